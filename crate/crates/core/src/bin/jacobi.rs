fn main() -> std::process::ExitCode {
    jacobi::cli::main()
}
