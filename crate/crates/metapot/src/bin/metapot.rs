fn main() -> std::process::ExitCode {
    metapot::cli::main()
}
