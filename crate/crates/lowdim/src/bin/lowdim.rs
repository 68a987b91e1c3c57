fn main() {
    std::process::exit(lowdim::cli::run());
}
