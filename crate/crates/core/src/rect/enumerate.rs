use serde::Serialize;

use super::cbo::{Control, Incidence};
use super::{require_search_size, IndexSet, Rectangle};
use crate::error::Result;
use crate::matrix::{BoolFun, Sign};

/// Maximal monochromatic rectangles, sorted by row set then column set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaximalRects {
    pub rects: Vec<Rectangle>,
    /// More than `budget` rectangles exist; `rects` is then a deterministic
    /// but incomplete subset.
    pub truncated: bool,
}

/// Lists every maximal monochromatic rectangle of both colors, up to
/// `budget` of them.
pub fn enumerate_maximal_mono(f: &BoolFun, budget: usize) -> Result<MaximalRects> {
    require_search_size(f, "maximal rectangle enumeration")?;
    let mut rects = Vec::new();
    let mut truncated = false;
    'colors: for color in Sign::both() {
        let inc = Incidence::new(f.row_masks(color).expect("cols checked"), f.cols());
        inc.run(&mut |rows, cols, _| {
            if rows != 0 && cols != 0 {
                if rects.len() == budget {
                    truncated = true;
                    return Control::Stop;
                }
                rects.push(Rectangle::new(IndexSet::from_mask(rows), IndexSet::from_mask(cols), Some(color)));
            }
            Control::Descend
        });
        if truncated {
            break 'colors;
        }
    }
    rects.sort();
    Ok(MaximalRects { rects, truncated })
}
