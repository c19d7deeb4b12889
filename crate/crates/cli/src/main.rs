fn main() {
    std::process::exit(matroid_im_cli::main_with(std::env::args_os()));
}
