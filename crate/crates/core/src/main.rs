fn main() {
    std::process::exit(boussfrac::io::run(std::env::args_os()));
}
