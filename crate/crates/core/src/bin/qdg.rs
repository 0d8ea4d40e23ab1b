fn main() {
    match qdg_core::cli::main_with_args(std::env::args_os()) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
