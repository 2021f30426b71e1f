//! The instance file: a TOML document naming an algebra, modules, maps,
//! complexes and endomorphisms.
//!
//! ```toml
//! [algebra]
//! blocks = [1, 2]
//!
//! [modules.M]
//! rank = 2
//! projection = [[["1,0", "0,0"], ["0,0", "0,0"]], [...]]   # one matrix per block
//!
//! [maps.u]
//! source = "M"
//! target = "M"
//! matrix = [...]
//!
//! [complexes.c]
//! spaces = ["E0", "E1"]
//! differentials = ["d0"]
//!
//! [endomorphisms.U]
//! complex = "c"
//! components = ["U0", "U1"]
//! ```
//!
//! An `A`-matrix with `r × c` entries is written as a list of its blocks; block
//! `j` is the `(r·n_j) × (c·n_j)` complex matrix, row-major, entries as `"re,im"`
//! in shortest round-trip decimal form. A module without `projection` is free.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgMatrix, BlockAlgebra};
use crate::complex::{ComplexEndomorphism, FiniteComplex};
use crate::module::HilbertModule;
use crate::operator::ModuleMap;
use crate::tol::tolerances;
use crate::{CMat, C64};

/// Per-block matrices of strings, as stored on disk.
pub type BlockMatrices = Vec<Vec<Vec<String>>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub algebra: AlgebraSection,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub modules: BTreeMap<String, ModuleSection>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub maps: BTreeMap<String, MapSection>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub complexes: BTreeMap<String, ComplexSection>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub endomorphisms: BTreeMap<String, EndomorphismSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSection {
    pub blocks: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSection {
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projection: Option<BlockMatrices>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSection {
    pub source: String,
    pub target: String,
    pub matrix: BlockMatrices,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexSection {
    pub spaces: Vec<String>,
    pub differentials: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndomorphismSection {
    pub complex: String,
    pub components: Vec<String>,
}

/// One load-time problem, attributed to a named object.
#[derive(Debug, Clone, PartialEq)]
pub struct Defect {
    pub object: String,
    pub message: String,
    pub residual: Option<f64>,
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.object, self.message)?;
        if let Some(r) = self.residual {
            write!(f, " (residual {r:.3e})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InstanceError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid instance:\n{}", .0.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n"))]
    Semantic(Vec<Defect>),
}

/// A parsed and validated instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub file: InstanceFile,
    pub algebra: BlockAlgebra,
    pub modules: BTreeMap<String, HilbertModule>,
    pub maps: BTreeMap<String, ModuleMap>,
    pub complexes: BTreeMap<String, FiniteComplex>,
    pub endomorphisms: BTreeMap<String, (String, ComplexEndomorphism)>,
}

pub fn format_complex(z: C64) -> String {
    format!("{},{}", z.re, z.im)
}

pub fn parse_complex(s: &str) -> Option<C64> {
    let (re, im) = s.split_once(',')?;
    Some(C64::new(re.trim().parse().ok()?, im.trim().parse().ok()?))
}

/// On-disk form of an `A`-matrix.
pub fn encode_matrix(m: &AlgMatrix) -> BlockMatrices {
    m.blocks()
        .iter()
        .map(|b| (0..b.nrows()).map(|i| (0..b.ncols()).map(|l| format_complex(b[(i, l)])).collect()).collect())
        .collect()
}

fn decode_matrix(
    algebra: &BlockAlgebra,
    rows: usize,
    cols: usize,
    data: &BlockMatrices,
    object: &str,
    defects: &mut Vec<Defect>,
) -> Option<AlgMatrix> {
    let defect = |message: String| Defect { object: object.to_string(), message, residual: None };
    if data.len() != algebra.num_blocks() {
        defects.push(defect(format!("expected {} blocks, found {}", algebra.num_blocks(), data.len())));
        return None;
    }
    let mut blocks = Vec::with_capacity(data.len());
    for (j, (rows_data, &n)) in data.iter().zip(algebra.block_sizes()).enumerate() {
        let (r, c) = (rows * n, cols * n);
        // an empty row list stands for any matrix with zero rows
        if rows_data.len() != r || rows_data.iter().any(|row| row.len() != c) {
            let found_cols = rows_data.first().map_or(0, Vec::len);
            defects.push(defect(format!("block {j} should be {r}×{c}, found {}×{found_cols}", rows_data.len())));
            return None;
        }
        let mut b = CMat::zeros(r, c);
        for (i, row) in rows_data.iter().enumerate() {
            for (l, s) in row.iter().enumerate() {
                match parse_complex(s) {
                    Some(z) => b[(i, l)] = z,
                    None => {
                        defects.push(defect(format!("block {j} entry ({i}, {l}) is not a \"re,im\" pair: {s:?}")));
                        return None;
                    }
                }
            }
        }
        blocks.push(b);
    }
    AlgMatrix::from_blocks(algebra, rows, cols, blocks).ok()
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

pub fn parse_instance_str(text: &str) -> Result<Instance, InstanceError> {
    let file: InstanceFile = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
        InstanceError::Syntax { line, column, message: e.message().to_string() }
    })?;
    validate_instance(file)
}

pub fn parse_instance(path: &Path) -> Result<Instance, InstanceError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InstanceError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_instance_str(&text)
}

/// Resolves names and checks every defining identity, collecting all defects.
pub fn validate_instance(file: InstanceFile) -> Result<Instance, InstanceError> {
    let mut defects = Vec::new();
    let tol = tolerances().identity();
    let algebra = match BlockAlgebra::new(file.algebra.blocks.clone()) {
        Ok(a) => a,
        Err(e) => {
            return Err(InstanceError::Semantic(vec![Defect {
                object: "algebra".into(),
                message: e.to_string(),
                residual: None,
            }]))
        }
    };

    let mut modules = BTreeMap::new();
    for (name, section) in &file.modules {
        let object = format!("module {name}");
        match &section.projection {
            None => {
                modules.insert(name.clone(), HilbertModule::free(&algebra, section.rank));
            }
            Some(data) => {
                if let Some(p) = decode_matrix(&algebra, section.rank, section.rank, data, &object, &mut defects) {
                    let residual = p.projection_residual();
                    if residual > tol {
                        defects.push(Defect { object, message: "projection is not a self-adjoint idempotent".into(), residual: Some(residual) });
                    } else {
                        modules.insert(name.clone(), HilbertModule::new(p).expect("checked above"));
                    }
                }
            }
        }
    }

    let mut maps = BTreeMap::new();
    for (name, section) in &file.maps {
        let object = format!("map {name}");
        let mut resolve = |m: &str| {
            let found = modules.get(m).cloned();
            if found.is_none() && !file.modules.contains_key(m) {
                defects.push(Defect { object: object.clone(), message: format!("unknown module {m:?}"), residual: None });
            }
            found
        };
        let (source, target) = (resolve(&section.source), resolve(&section.target));
        let (Some(source), Some(target)) = (source, target) else { continue };
        let Some(t) = decode_matrix(&algebra, source.ambient_rank(), target.ambient_rank(), &section.matrix, &object, &mut defects)
        else {
            continue;
        };
        let residual = (&(source.projection() * &t) * target.projection()).dist(&t);
        if residual > tol {
            defects.push(Defect { object, message: "matrix does not respect the module presentations".into(), residual: Some(residual) });
            continue;
        }
        maps.insert(name.clone(), ModuleMap::new(&source, &target, t).expect("checked above"));
    }

    let mut complexes = BTreeMap::new();
    for (name, section) in &file.complexes {
        let object = format!("complex {name}");
        let mut missing = false;
        let spaces: Vec<HilbertModule> = section
            .spaces
            .iter()
            .filter_map(|s| {
                let m = modules.get(s).cloned();
                if m.is_none() {
                    missing = true;
                    if !file.modules.contains_key(s) {
                        defects.push(Defect { object: object.clone(), message: format!("unknown module {s:?}"), residual: None });
                    }
                }
                m
            })
            .collect();
        let differentials: Vec<ModuleMap> = section
            .differentials
            .iter()
            .filter_map(|d| {
                let m = maps.get(d).cloned();
                if m.is_none() {
                    missing = true;
                    if !file.maps.contains_key(d) {
                        defects.push(Defect { object: object.clone(), message: format!("unknown map {d:?}"), residual: None });
                    }
                }
                m
            })
            .collect();
        if missing {
            continue;
        }
        match FiniteComplex::new(spaces, differentials) {
            Ok(c) => {
                complexes.insert(name.clone(), c);
            }
            Err(e) => defects.push(Defect { object, message: e.to_string(), residual: None }),
        }
    }

    let mut endomorphisms = BTreeMap::new();
    for (name, section) in &file.endomorphisms {
        let object = format!("endomorphism {name}");
        let Some(c) = complexes.get(&section.complex) else {
            if !file.complexes.contains_key(&section.complex) {
                defects.push(Defect { object, message: format!("unknown complex {:?}", section.complex), residual: None });
            }
            continue;
        };
        let mut components = Vec::new();
        for u in &section.components {
            match maps.get(u) {
                Some(m) => components.push(m.clone()),
                None if !file.maps.contains_key(u) => {
                    defects.push(Defect { object: object.clone(), message: format!("unknown map {u:?}"), residual: None })
                }
                None => {}
            }
        }
        if components.len() != section.components.len() {
            continue;
        }
        for (m, u) in components.iter().enumerate() {
            let residual = u.unitary_residual();
            if residual > tol {
                defects.push(Defect { object: object.clone(), message: format!("component {m} is not unitary"), residual: Some(residual) });
            }
        }
        match ComplexEndomorphism::new(c, components) {
            Ok(e) => {
                endomorphisms.insert(name.clone(), (section.complex.clone(), e));
            }
            Err(e) => defects.push(Defect { object, message: e.to_string(), residual: None }),
        }
    }

    if !defects.is_empty() {
        return Err(InstanceError::Semantic(defects));
    }
    Ok(Instance { file, algebra, modules, maps, complexes, endomorphisms })
}

/// TOML text of an instance file.
pub fn emit_instance(file: &InstanceFile) -> String {
    toml::to_string(file).expect("instance files always serialize")
}

/// Collects named objects into an instance file.
#[derive(Debug, Clone)]
pub struct InstanceBuilder {
    file: InstanceFile,
}

impl InstanceBuilder {
    pub fn new(algebra: &BlockAlgebra) -> Self {
        InstanceBuilder {
            file: InstanceFile {
                algebra: AlgebraSection { blocks: algebra.block_sizes().to_vec() },
                modules: BTreeMap::new(),
                maps: BTreeMap::new(),
                complexes: BTreeMap::new(),
                endomorphisms: BTreeMap::new(),
            },
        }
    }

    pub fn module(&mut self, name: &str, m: &HilbertModule) -> &mut Self {
        let free = m.projection().dist(&AlgMatrix::identity(m.algebra(), m.ambient_rank())) == 0.0;
        let projection = (!free).then(|| encode_matrix(m.projection()));
        self.file.modules.insert(name.to_string(), ModuleSection { rank: m.ambient_rank(), projection });
        self
    }

    pub fn map(&mut self, name: &str, source: &str, target: &str, t: &ModuleMap) -> &mut Self {
        self.file.maps.insert(
            name.to_string(),
            MapSection { source: source.to_string(), target: target.to_string(), matrix: encode_matrix(t.matrix()) },
        );
        self
    }

    pub fn complex(&mut self, name: &str, spaces: &[String], differentials: &[String]) -> &mut Self {
        self.file
            .complexes
            .insert(name.to_string(), ComplexSection { spaces: spaces.to_vec(), differentials: differentials.to_vec() });
        self
    }

    pub fn endomorphism(&mut self, name: &str, complex: &str, components: &[String]) -> &mut Self {
        self.file.endomorphisms.insert(
            name.to_string(),
            EndomorphismSection { complex: complex.to_string(), components: components.to_vec() },
        );
        self
    }

    pub fn build(self) -> InstanceFile {
        self.file
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[algebra]
blocks = [1]

[modules.M]
rank = 1

[maps.U]
source = "M"
target = "M"
matrix = [[["1,0"]]]
"#;

    #[test]
    fn minimal_file_parses() {
        let inst = parse_instance_str(MINIMAL).unwrap();
        assert_eq!(inst.maps["U"].matrix().block(0)[(0, 0)], C64::new(1.0, 0.0));
    }

    #[test]
    fn bad_projection_is_named() {
        let text = "[algebra]\nblocks = [1]\n[modules.P]\nrank = 1\nprojection = [[[\"2,0\"]]]\n";
        match parse_instance_str(text) {
            Err(InstanceError::Semantic(d)) => {
                assert_eq!(d.len(), 1);
                assert_eq!(d[0].object, "module P");
                assert!((d[0].residual.unwrap() - 2.0).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_error_has_position() {
        let text = "[algebra]\nblocks = [1\n";
        match parse_instance_str(text) {
            Err(InstanceError::Syntax { line, .. }) => assert!(line >= 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unresolved_names_are_reported() {
        let text = "[algebra]\nblocks = [1]\n[maps.f]\nsource = \"X\"\ntarget = \"Y\"\nmatrix = []\n";
        match parse_instance_str(text) {
            Err(InstanceError::Semantic(d)) => assert_eq!(d.len(), 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn complex_numbers_round_trip() {
        for z in [C64::new(0.1, -1e-300), C64::new(-0.0, 1.0 / 3.0), C64::new(f64::MAX, 5e-324)] {
            assert_eq!(parse_complex(&format_complex(z)), Some(z));
        }
    }
}
