use layman_eval_cli::{run, Context};

fn main() {
    let ctx = Context::from_process();
    let code = run(std::env::args_os(), &ctx, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
