fn main() {
    std::process::exit(maglab::run(std::env::args_os()));
}
