mod common;
use ibmc_core::frontend::{compile, CompileOptions};
#[test]
fn generated_programs_compile() {
    let mut bad = 0;
    for seed in 0..500 {
        let src = common::Gen::new(seed).program();
        if let Err(e) = compile(&src, CompileOptions::default()) {
            bad += 1;
            if bad < 5 {
                eprintln!("{e}\n{src}\n");
            }
        }
    }
    assert_eq!(bad, 0);
}
