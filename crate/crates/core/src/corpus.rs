//! Named example groups shared by the tests, the CLI examples and the README.
//! The texts are the files under `data/`.

/// `(name, presentation file text)`.
pub const PRESENTATIONS: &[(&str, &str)] = &[
    ("trivial", include_str!("../data/trivial.pres")),
    ("z", include_str!("../data/z.pres")),
    ("f2", include_str!("../data/f2.pres")),
    ("f3", include_str!("../data/f3.pres")),
    ("z2", include_str!("../data/z2.pres")),
    ("z3", include_str!("../data/z3.pres")),
    ("z2_free", include_str!("../data/z2_free.pres")),
    ("klein", include_str!("../data/klein.pres")),
    ("klein_hnn", include_str!("../data/klein_hnn.pres")),
    ("bs12", include_str!("../data/bs12.pres")),
    ("bs23", include_str!("../data/bs23.pres")),
    ("trefoil", include_str!("../data/trefoil.pres")),
    ("torus25", include_str!("../data/torus25.pres")),
    ("c5", include_str!("../data/c5.pres")),
    ("c3_free", include_str!("../data/c3_free.pres")),
    ("genus2", include_str!("../data/genus2.pres")),
    ("nonorientable2", include_str!("../data/nonorientable2.pres")),
    ("infinite_dihedral", include_str!("../data/infinite_dihedral.pres")),
    ("klein_four", include_str!("../data/klein_four.pres")),
    ("s3", include_str!("../data/s3.pres")),
    ("quaternion", include_str!("../data/quaternion.pres")),
    ("baumslag_gersten", include_str!("../data/baumslag_gersten.pres")),
    ("subscripted", include_str!("../data/subscripted.pres")),
    ("commented", include_str!("../data/commented.pres")),
];

/// `(name, splitting file text)`.
pub const SPLITTINGS: &[(&str, &str)] = &[
    ("trefoil_amalgam", include_str!("../data/trefoil_amalgam.split")),
    ("free_product", include_str!("../data/free_product.split")),
    ("z2_amalgam", include_str!("../data/z2_amalgam.split")),
    ("sl2z", include_str!("../data/sl2z.split")),
    ("bs12_hnn", include_str!("../data/bs12_hnn.split")),
    ("klein_hnn", include_str!("../data/klein_hnn.split")),
];

pub fn presentation(name: &str) -> Option<&'static str> {
    PRESENTATIONS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn splitting(name: &str) -> Option<&'static str> {
    SPLITTINGS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}
