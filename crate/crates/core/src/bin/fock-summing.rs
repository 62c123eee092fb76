fn main() {
    std::process::exit(fock_summing::cli::main());
}
