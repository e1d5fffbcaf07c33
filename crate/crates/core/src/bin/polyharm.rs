fn main() -> std::process::ExitCode {
    polyharmonic::cli::main()
}
