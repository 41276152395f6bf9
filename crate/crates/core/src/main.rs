fn main() -> std::process::ExitCode {
    symdyn::cli::main()
}
