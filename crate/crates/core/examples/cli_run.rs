//! Driving the command-line front end in-process.
fn main() {
    let argv = ["operadkit", "hilbert", "--family", "mas", "--horizon", "8", "--format", "csv"];
    let code = operadkit::cli::run(argv, &mut std::io::stdout(), &mut std::io::stderr());
    println!("exit code {code}");
}
