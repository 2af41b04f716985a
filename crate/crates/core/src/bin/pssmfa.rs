fn main() -> std::process::ExitCode {
    pssmfa::cli::run()
}
