fn main() {
    std::process::exit(opconvex::cli::run());
}
