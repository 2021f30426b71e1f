//! Building an instance in code, writing it as TOML and reading it back.

use wstar::cli::instance::{emit_instance, parse_instance_str, InstanceBuilder};
use wstar::{AlgMatrix, BlockAlgebra, CMat, HilbertModule, ModuleMap, C64};

fn main() {
    let a = BlockAlgebra::new(vec![1]).unwrap();
    let e = HilbertModule::free(&a, 1);
    let scalar = |v: f64| {
        let t = AlgMatrix::from_blocks(&a, 1, 1, vec![CMat::from_element(1, 1, C64::new(v, 0.0))]).unwrap();
        ModuleMap::new(&e, &e, t).unwrap()
    };
    let mut b = InstanceBuilder::new(&a);
    b.module("E0", &e).module("E1", &e);
    b.map("d0", "E0", "E1", &scalar(0.0)).map("U0", "E0", "E0", &scalar(1.0)).map("U1", "E1", "E1", &scalar(-1.0));
    b.complex("c", &["E0".into(), "E1".into()], &["d0".into()]);
    b.endomorphism("U", "c", &["U0".into(), "U1".into()]);
    let text = emit_instance(&b.build());
    print!("{text}");

    let inst = parse_instance_str(&text).unwrap();
    println!("# read back: {} modules, {} maps, {} complex", inst.modules.len(), inst.maps.len(), inst.complexes.len());
}
