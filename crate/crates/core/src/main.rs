fn main() -> std::process::ExitCode {
    qcnn::cli::main_entry()
}
