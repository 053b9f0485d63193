//! Homogeneous Littlewood-Paley analysis on the periodic lattice.

mod besov;
mod bony;
mod chemin_lerner;
mod filters;
mod probe;

pub use besov::{low_high, BesovReport, Summability};
pub use bony::{bony_decompose, dealiased_product, paraproduct_piece, BonyParts};
pub use chemin_lerner::{chemin_lerner_from_shells, shell_time_norms, time_norm};
pub use filters::{shell_weight, smoothstep, DyadicFilterBank, ShellNorms};
pub use probe::{
    product_inequality_probe, product_ratio, random_power_law, ProductProbe, ProductVariant,
};
