fn main() {
    std::process::exit(vcreg::run(std::env::args_os()));
}
