fn main() { std::process::exit(vdckit_cli_stub()); } fn vdckit_cli_stub() -> i32 { 0 }
