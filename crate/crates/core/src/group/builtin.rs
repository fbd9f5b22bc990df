//! The builtin menu of groups with hardcoded irreps.

use std::f64::consts::PI;
use std::sync::Arc;

use itertools::Itertools;
use nalgebra::DMatrix;

use super::{GroupTable, Irrep, IrrepRegistry};
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupKind {
    Cyclic,
    Dihedral,
    Symmetric,
    Quaternion,
}

/// Names accepted by [`builtin_by_name`] besides the parametric `zN` / `dN`.
pub const BUILTIN_NAMES: &[&str] = &["trivial", "z4", "z6", "s3", "s4", "d4", "q8"];

pub fn builtin_group(kind: GroupKind, param: usize) -> Result<(Arc<GroupTable>, IrrepRegistry)> {
    let unsupported = || Error::UnsupportedGroup(format!("{kind:?}({param})"));
    let (table, irreps) = match kind {
        GroupKind::Cyclic if (1..=super::MAX_ORDER).contains(&param) => cyclic(param),
        GroupKind::Dihedral if (3..=super::MAX_ORDER / 2).contains(&param) => dihedral(param),
        GroupKind::Symmetric if param == 3 || param == 4 => symmetric(param),
        GroupKind::Quaternion if param == 8 => quaternion(),
        _ => return Err(unsupported()),
    };
    let table = Arc::new(table);
    let registry = IrrepRegistry::new(Arc::clone(&table), irreps)?;
    Ok((table, registry))
}

/// Resolves `trivial`, `zN`/`cN`, `dN`, `s3`, `s4`, `q8`.
pub fn builtin_by_name(name: &str) -> Result<(Arc<GroupTable>, IrrepRegistry)> {
    let lower = name.trim().to_ascii_lowercase();
    if lower == "trivial" {
        return builtin_group(GroupKind::Cyclic, 1);
    }
    let (head, tail) = lower.split_at(lower.chars().next().map_or(0, char::len_utf8));
    let param: usize = tail.parse().map_err(|_| Error::UnsupportedGroup(name.to_string()))?;
    let kind = match head {
        "z" | "c" => GroupKind::Cyclic,
        "d" => GroupKind::Dihedral,
        "s" => GroupKind::Symmetric,
        "q" => GroupKind::Quaternion,
        _ => return Err(Error::UnsupportedGroup(name.to_string())),
    };
    builtin_group(kind, param)
}

fn one_dim(label: impl Into<String>, values: Vec<num_complex::Complex64>) -> Irrep {
    Irrep {
        label: label.into(),
        dim: 1,
        matrices: values.into_iter().map(|v| CMatrix::from_element(1, 1, v)).collect(),
    }
}

fn cyclic(n: usize) -> (GroupTable, Vec<Irrep>) {
    let mult = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    let inv = (0..n).map(|a| (n - a) % n).collect();
    let name = if n == 1 { "trivial".to_string() } else { format!("z{n}") };
    let table = GroupTable::from_tables(name, mult, inv, 0).expect("cyclic table");
    let irreps = (0..n)
        .map(|j| {
            let values = (0..n)
                .map(|t| {
                    let angle = 2.0 * PI * ((j * t) % n) as f64 / n as f64;
                    c(angle.cos(), angle.sin())
                })
                .collect();
            one_dim(format!("chi{j}"), values)
        })
        .collect();
    (table, irreps)
}

/// Element `k + n·e` stands for `r^k s^e`.
fn dihedral(n: usize) -> (GroupTable, Vec<Irrep>) {
    let order = 2 * n;
    let split = |x: usize| (x % n, x / n);
    let join = |k: usize, e: usize| k % n + n * e;
    let mult = (0..order)
        .map(|a| {
            (0..order)
                .map(|b| {
                    let (k1, e1) = split(a);
                    let (k2, e2) = split(b);
                    let k = if e1 == 0 { k1 + k2 } else { k1 + n - k2 };
                    join(k, e1 ^ e2)
                })
                .collect()
        })
        .collect();
    let inv = (0..order)
        .map(|a| {
            let (k, e) = split(a);
            if e == 0 {
                join(n - k, 0)
            } else {
                a
            }
        })
        .collect();
    let table = GroupTable::from_tables(format!("d{n}"), mult, inv, 0).expect("dihedral table");

    let mut irreps = Vec::new();
    let one = |r_sign: f64, s_sign: f64| -> Vec<num_complex::Complex64> {
        (0..order)
            .map(|x| {
                let (k, e) = split(x);
                c(r_sign.powi(k as i32) * s_sign.powi(e as i32), 0.0)
            })
            .collect()
    };
    irreps.push(one_dim("trivial", one(1.0, 1.0)));
    irreps.push(one_dim("sign", one(1.0, -1.0)));
    if n.is_multiple_of(2) {
        irreps.push(one_dim("rot-sign", one(-1.0, 1.0)));
        irreps.push(one_dim("rot-sign*sign", one(-1.0, -1.0)));
    }
    let swap = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    for h in 1..=(n - 1) / 2 {
        let matrices = (0..order)
            .map(|x| {
                let (k, e) = split(x);
                let angle = 2.0 * PI * ((h * k) % n) as f64 / n as f64;
                let rot = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                    c(angle.cos(), angle.sin()),
                    c(angle.cos(), -angle.sin()),
                ]));
                if e == 0 {
                    rot
                } else {
                    rot * &swap
                }
            })
            .collect();
        irreps.push(Irrep {
            label: format!("rho{h}"),
            dim: 2,
            matrices,
        });
    }
    (table, irreps)
}

/// Helmert basis of the sum-zero hyperplane of ℂ^n, as an n×(n−1) matrix
/// with orthonormal columns.
fn helmert(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n - 1, |i, j| {
        let j1 = (j + 1) as f64;
        let norm = (j1 * (j1 + 1.0)).sqrt();
        if i <= j {
            1.0 / norm
        } else if i == j + 1 {
            -j1 / norm
        } else {
            0.0
        }
    })
}

fn permutation_matrix(p: &[usize]) -> DMatrix<f64> {
    let n = p.len();
    // column i is e_{p(i)}
    DMatrix::from_fn(n, n, |r, col| if p[col] == r { 1.0 } else { 0.0 })
}

fn parity(p: &[usize]) -> f64 {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn standard_rep(p: &[usize]) -> DMatrix<f64> {
    let q = helmert(p.len());
    q.transpose() * permutation_matrix(p) * q
}

fn real_to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| c(x, 0.0))
}

/// Permutations in lexicographic order; `(στ)(i) = σ(τ(i))`.
fn symmetric(n: usize) -> (GroupTable, Vec<Irrep>) {
    let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let index = |p: &[usize]| perms.iter().position(|q| q.as_slice() == p).expect("permutation");
    let mult = perms
        .iter()
        .map(|s| {
            perms
                .iter()
                .map(|t| {
                    let st: Vec<usize> = (0..n).map(|i| s[t[i]]).collect();
                    index(&st)
                })
                .collect()
        })
        .collect();
    let inv = perms
        .iter()
        .map(|s| {
            let mut si = vec![0; n];
            for (i, &x) in s.iter().enumerate() {
                si[x] = i;
            }
            index(&si)
        })
        .collect();
    let table = GroupTable::from_tables(format!("s{n}"), mult, inv, 0).expect("symmetric table");

    let sign: Vec<f64> = perms.iter().map(|p| parity(p)).collect();
    let mut irreps = vec![
        one_dim("trivial", vec![c(1.0, 0.0); perms.len()]),
        one_dim("sign", sign.iter().map(|&s| c(s, 0.0)).collect()),
        Irrep {
            label: "standard".into(),
            dim: n - 1,
            matrices: perms.iter().map(|p| real_to_complex(&standard_rep(p))).collect(),
        },
    ];
    if n == 4 {
        irreps.push(Irrep {
            label: "standard*sign".into(),
            dim: 3,
            matrices: perms
                .iter()
                .zip(&sign)
                .map(|(p, &s)| real_to_complex(&(standard_rep(p) * s)))
                .collect(),
        });
        // S4 acts on the three pairings {01|23}, {02|13}, {03|12}; composing
        // that quotient map S4 → S3 with the standard S3 irrep gives the 2-dim irrep.
        let pairings: [[usize; 2]; 3] = [[0, 1], [0, 2], [0, 3]];
        let pairing_of = |a: usize, b: usize| -> usize {
            let partner = if a == 0 {
                b
            } else if b == 0 {
                a
            } else {
                6 - a - b
            };
            pairings.iter().position(|p| p[1] == partner).expect("pairing")
        };
        irreps.push(Irrep {
            label: "two-dim".into(),
            dim: 2,
            matrices: perms
                .iter()
                .map(|p| {
                    let action: Vec<usize> = pairings.iter().map(|pair| pairing_of(p[pair[0]], p[pair[1]])).collect();
                    real_to_complex(&standard_rep(&action))
                })
                .collect(),
        });
    }
    (table, irreps)
}

/// Elements in the order 1, −1, i, −i, j, −j, k, −k, built from the
/// Pauli-type 2×2 representation.
fn quaternion() -> (GroupTable, Vec<Irrep>) {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let unit = [
        DMatrix::from_row_slice(2, 2, &[one, z, z, one]),
        DMatrix::from_row_slice(2, 2, &[i, z, z, -i]),
        DMatrix::from_row_slice(2, 2, &[z, one, -one, z]),
        DMatrix::from_row_slice(2, 2, &[z, i, i, z]),
    ];
    let mats: Vec<CMatrix> = (0..8)
        .map(|x| {
            let m = unit[x / 2].clone();
            if x % 2 == 0 {
                m
            } else {
                -m
            }
        })
        .collect();
    let find = |m: &CMatrix| {
        mats.iter()
            .position(|q| crate::linalg::max_abs_diff(q, m) < 1e-12)
            .expect("closed under products")
    };
    let mult = (0..8)
        .map(|a| (0..8).map(|b| find(&(&mats[a] * &mats[b]))).collect())
        .collect();
    let inv = (0..8).map(|a| find(&mats[a].adjoint())).collect();
    let table = GroupTable::from_tables("q8", mult, inv, 0).expect("quaternion table");

    // 1-dim characters are trivial on ±1 and on one of the three axes.
    let axis_char = |keep: usize| -> Vec<num_complex::Complex64> {
        (0..8)
            .map(|x| {
                let axis = x / 2;
                if axis == 0 || axis == keep {
                    one
                } else {
                    -one
                }
            })
            .collect()
    };
    let irreps = vec![
        one_dim("trivial", vec![one; 8]),
        one_dim("chi_i", axis_char(1)),
        one_dim("chi_j", axis_char(2)),
        one_dim("chi_k", axis_char(3)),
        Irrep {
            label: "pauli".into(),
            dim: 2,
            matrices: mats,
        },
    ];
    (table, irreps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{validate_group, validate_irreps, Tolerances};

    #[test]
    fn menu_dims() {
        let dims = |name: &str| {
            let (_, r) = builtin_by_name(name).unwrap();
            let mut d = r.dims();
            d.sort();
            d
        };
        assert_eq!(dims("z4"), vec![1, 1, 1, 1]);
        assert_eq!(dims("s3"), vec![1, 1, 2]);
        assert_eq!(dims("q8"), vec![1, 1, 1, 1, 2]);
        assert_eq!(dims("d4"), vec![1, 1, 1, 1, 2]);
        assert_eq!(dims("d5"), vec![1, 1, 2, 2]);
        assert_eq!(dims("s4"), vec![1, 1, 2, 3, 3]);
        assert_eq!(dims("trivial"), vec![1]);
    }

    #[test]
    fn every_builtin_validates() {
        for name in [
            "trivial", "z2", "z4", "z6", "z7", "s3", "s4", "d3", "d4", "d5", "d6", "q8",
        ] {
            let (g, r) = builtin_by_name(name).unwrap();
            assert!(validate_group(&g).is_valid(), "{name}");
            let report = validate_irreps(&g, &r, &Tolerances::default()).unwrap();
            assert!(report.pass(), "{name}: {:?}", report.failures);
            assert!(report.max_unitarity() <= 1e-12);
            assert!(report.max_homomorphism() <= 1e-12);
        }
    }

    #[test]
    fn cyclic_characters_are_roots_of_unity() {
        let (_, r) = builtin_by_name("z4").unwrap();
        let chi1 = r.irreps()[1].character();
        assert!((chi1[1] - c(0.0, 1.0)).norm() < 1e-15);
        assert!((chi1[2] - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn unsupported_parameters() {
        assert!(matches!(
            builtin_group(GroupKind::Symmetric, 5),
            Err(Error::UnsupportedGroup(_))
        ));
        assert!(builtin_group(GroupKind::Dihedral, 2).is_err());
        assert!(builtin_group(GroupKind::Quaternion, 16).is_err());
        assert!(builtin_group(GroupKind::Cyclic, 0).is_err());
        assert!(builtin_by_name("x9").is_err());
    }
}
