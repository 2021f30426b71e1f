use wstar::cli::generate::{generate_instance, Profile};
use wstar::cli::instance::{emit_instance, parse_instance, parse_instance_str, validate_instance, InstanceError};

#[test]
fn emit_then_parse_is_identity() {
    for profile in [Profile::Small, Profile::Medium] {
        for seed in 0..25 {
            let file = generate_instance(seed, profile);
            let text = emit_instance(&file);
            let back = parse_instance_str(&text).unwrap_or_else(|e| panic!("{profile} seed {seed}: {e}"));
            assert_eq!(back.file, file, "{profile} seed {seed}");
            let direct = validate_instance(file).unwrap();
            for (name, m) in &direct.maps {
                assert_eq!(back.maps[name].matrix(), m.matrix(), "{profile} seed {seed} map {name}");
            }
            assert_eq!(emit_instance(&back.file), text);
        }
    }
}

#[test]
fn generation_is_byte_stable() {
    let a = emit_instance(&generate_instance(0, Profile::Small));
    let b = emit_instance(&generate_instance(0, Profile::Small));
    assert_eq!(a, b);
    assert_ne!(a, emit_instance(&generate_instance(1, Profile::Small)));
}

#[test]
fn every_defect_is_listed() {
    let text = r#"
[algebra]
blocks = [1, 2]

[modules.P]
rank = 1
projection = [[["2,0"]], [["1,0", "0,0"], ["1,0", "0,0"]]]

[maps.f]
source = "P"
target = "Q"
matrix = []

[complexes.c]
spaces = ["P"]
differentials = ["g"]
"#;
    match parse_instance_str(text) {
        Err(InstanceError::Semantic(defects)) => {
            let objects: Vec<&str> = defects.iter().map(|d| d.object.as_str()).collect();
            assert!(objects.contains(&"module P"), "{objects:?}");
            assert!(objects.iter().any(|o| o.contains('f')), "{objects:?}");
            assert!(objects.iter().any(|o| o.contains('c')), "{objects:?}");
            assert!(defects.iter().find(|d| d.object == "module P").unwrap().residual.unwrap() > 0.5);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn unknown_keys_are_rejected() {
    let text = "[algebra]\nblocks = [1]\ncolour = \"blue\"\n";
    assert!(matches!(parse_instance_str(text), Err(InstanceError::Syntax { .. })));
}

#[test]
fn missing_file_is_an_io_error() {
    assert!(matches!(parse_instance(std::path::Path::new("/no/such/file.toml")), Err(InstanceError::Io { .. })));
}
