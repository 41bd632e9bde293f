use super::cbo::{low_mask, Control, Incidence};
use super::{require_search_size, IndexSet, MaskIter, Rectangle};
use crate::error::Result;
use crate::matrix::{BoolFun, Sign};

/// A monochromatic rectangle of maximum area; among equal areas the
/// smallest in rectangle order wins.
///
/// Branch-and-bound over closed row sets: a subtree can only add rows at or
/// after its start index that still meet the current columns, so
/// `|cols| · (|rows| + such rows)` bounds every descendant.
pub fn max_mono_rectangle(f: &BoolFun) -> Result<Rectangle> {
    require_search_size(f, "maximum rectangle search")?;
    let mut best: Option<Rectangle> = None;
    let mut best_area = 0u64;
    for color in Sign::both() {
        let inc = Incidence::new(f.row_masks(color).expect("cols checked"), f.cols());
        let row_masks = inc.row_masks.clone();
        let n = inc.rows();
        inc.run(&mut |rows, cols, start| {
            if cols == 0 || rows == 0 && start >= n {
                return Control::Skip;
            }
            let area = rows.count_ones() as u64 * cols.count_ones() as u64;
            if rows != 0 && area >= best_area {
                let cand = Rectangle::new(IndexSet::from_mask(rows), IndexSet::from_mask(cols), Some(color));
                if area > best_area || best.as_ref().is_none_or(|b| cand < *b) {
                    best_area = area;
                    best = Some(cand);
                }
            }
            let extendable = MaskIter(!rows & !low_mask(start) & low_mask(n))
                .filter(|&k| row_masks[k] & cols != 0)
                .count() as u64;
            let bound = cols.count_ones() as u64 * (rows.count_ones() as u64 + extendable);
            if bound < best_area {
                Control::Skip
            } else {
                Control::Descend
            }
        });
    }
    Ok(best.expect("every non-empty matrix has a monochromatic cell"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{make_family, random_matrix, Family};
    use crate::rect::check_monochromatic;

    fn brute_max(f: &BoolFun) -> Rectangle {
        let mut best: Option<Rectangle> = None;
        for rm in 1u64..(1 << f.rows()) {
            for cm in 1u64..(1 << f.cols()) {
                let r = Rectangle::new(IndexSet::from_mask(rm), IndexSet::from_mask(cm), None);
                if let Some(c) = check_monochromatic(f, &r).unwrap() {
                    let r = r.with_color(c);
                    let better = match &best {
                        None => true,
                        Some(b) => r.area() > b.area() || (r.area() == b.area() && r < *b),
                    };
                    if better {
                        best = Some(r);
                    }
                }
            }
        }
        best.unwrap()
    }

    #[test]
    fn examples() {
        let c = BoolFun::from_fn(3, 5, |_, _| false).unwrap();
        assert_eq!(max_mono_rectangle(&c).unwrap().area(), 15);
        let xor2 = make_family(Family::Xor, 2, None, None).unwrap();
        assert_eq!(max_mono_rectangle(&xor2).unwrap().area(), 1);
        let eq4 = make_family(Family::Eq, 4, None, None).unwrap();
        let r = max_mono_rectangle(&eq4).unwrap();
        assert_eq!(r, Rectangle::from_indices([0, 1], [2, 3], Some(Sign::Plus)));
    }

    #[test]
    fn matches_brute_force_including_ties() {
        for seed in 0..80 {
            let rows = 1 + (seed as usize % 5);
            let cols = 1 + (seed as usize / 5 % 5);
            let f = random_matrix(rows, cols, 1000 + seed).unwrap();
            assert_eq!(max_mono_rectangle(&f).unwrap(), brute_max(&f), "seed {seed}");
        }
    }

    #[test]
    fn oversized_sides_are_a_capacity_error() {
        let f = random_matrix(70, 3, 5).unwrap();
        assert!(matches!(max_mono_rectangle(&f), Err(crate::Error::Capacity { .. })));
    }
}
