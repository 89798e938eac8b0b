fn main() {
    std::process::exit(largest_eig_cli::main_with_env());
}
