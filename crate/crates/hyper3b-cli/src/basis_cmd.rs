use crate::config::Config;
use crate::enumerate::check_k;
use crate::output::{emit, to_json};
use anyhow::{Context, Result};
use hyper3b::basis::{enumerate_tree_basis, tree_function, SymLabel, TreeLabel};
use hyper3b::polyops::{sphere_norm, Polynomial6};
use hyper3b::transform::block_sweep;
use rayon::prelude::*;
use serde::Serialize;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    /// Tree functions labelled (K, j1, j2, J, M).
    Tree,
    /// Omega eigenfunctions labelled (K, J, M, nu, omega index).
    Sym,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    #[arg(long = "K", allow_negative_numbers = true)]
    pub k: i32,
    #[arg(long, value_enum, default_value = "tree")]
    pub kind: Kind,
    /// Directory receiving one polynomial dump per function.
    #[arg(long = "out-dir")]
    pub out_dir: PathBuf,
    /// Manifest output (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
enum Label {
    Tree(TreeLabel),
    Sym(SymLabel),
}

#[derive(Debug, Serialize)]
struct Entry {
    label: Label,
    norm: f64,
    #[serde(rename = "polynomial-dump-path")]
    polynomial_dump_path: String,
}

pub fn run(args: &Args, cfg: &Config) -> Result<u8> {
    check_k(args.k, cfg)?;
    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    let items: Vec<(Label, String, Polynomial6)> = match args.kind {
        Kind::Tree => enumerate_tree_basis(args.k)
            .par_iter()
            .map(|l| {
                let name = format!("tree_K{}_j1{}_j2{}_J{}_M{}.poly", l.k, l.j1, l.j2, l.j, l.m);
                Ok((Label::Tree(*l), name, tree_function(l)?))
            })
            .collect::<Result<_>>()?,
        Kind::Sym => block_sweep(args.k)?
            .into_iter()
            .map(|f| {
                let l = f.label;
                let name = format!(
                    "sym_K{}_J{}_M{}_2nu{}_w{}.poly",
                    l.k, l.j, l.m, l.two_nu, l.omega_index
                );
                (Label::Sym(l), name, f.polynomial)
            })
            .collect(),
    };
    let mut manifest = Vec::with_capacity(items.len());
    for (label, name, poly) in items {
        let path = args.out_dir.join(&name);
        std::fs::write(&path, poly.dump())
            .with_context(|| format!("writing {}", path.display()))?;
        manifest.push(Entry {
            label,
            norm: sphere_norm(&poly),
            polynomial_dump_path: path.display().to_string(),
        });
    }
    emit(&to_json(&manifest)?, args.out.as_deref())?;
    Ok(0)
}
