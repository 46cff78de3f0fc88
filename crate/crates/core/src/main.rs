fn main() {
    std::process::exit(echoverse::cli::main());
}
