fn main() -> std::process::ExitCode {
    qtlattice::cli::main()
}
