fn main() -> std::process::ExitCode {
    cclab::cli::main()
}
