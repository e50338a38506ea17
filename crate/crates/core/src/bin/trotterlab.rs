fn main() {
    std::process::exit(trotterlab::cli::main());
}
