//! Per-type computation cache. Each stage is built on first use and shared by
//! later stages, so a command touching several results pays for each once.

use std::sync::OnceLock;

use crate::bgg::{invariant_generators, CoinvariantSpace};
use crate::chevalley::ChevalleyBasis;
use crate::error::{inconsistency, Error, Result};
use crate::monoid::{
    enumerate_monoid, pmap, realize_p0, MonoidGraph, Normalization, PGammaTable, PMap,
};
use crate::poly::Poly;
use crate::rootsys::{CartanType, RootData};
use crate::verify::generator_tables;
use crate::zhelobenko::{solve_generators, ZheloGenerator};

type Tables = (Vec<PGammaTable>, Vec<PGammaTable>);

pub struct Context {
    pub ty: CartanType,
    pub rd: RootData,
    /// Largest invariant degree whose Zhelobenko generator is solved for.
    pub max_degree: Option<u32>,
    chevalley: OnceLock<Result<ChevalleyBasis>>,
    invariants: OnceLock<Result<Vec<Poly>>>,
    coinvariants: OnceLock<Result<CoinvariantSpace>>,
    generators: OnceLock<Result<Vec<ZheloGenerator>>>,
    monoid: OnceLock<Result<MonoidGraph>>,
    pmap: OnceLock<Result<PMap>>,
    tables: OnceLock<Result<Tables>>,
}

fn cached<T>(cell: &OnceLock<Result<T>>, init: impl FnOnce() -> Result<T>) -> Result<&T> {
    cell.get_or_init(init).as_ref().map_err(Error::clone)
}

impl Context {
    pub fn new(ty: CartanType) -> Self {
        Context {
            ty,
            rd: RootData::from_type(ty),
            max_degree: None,
            chevalley: OnceLock::new(),
            invariants: OnceLock::new(),
            coinvariants: OnceLock::new(),
            generators: OnceLock::new(),
            monoid: OnceLock::new(),
            pmap: OnceLock::new(),
            tables: OnceLock::new(),
        }
    }

    pub fn with_max_degree(mut self, max_degree: Option<u32>) -> Self {
        self.max_degree = max_degree;
        self
    }

    pub fn from_tag(tag: &str) -> Result<Self> {
        Ok(Self::new(tag.parse()?))
    }

    pub fn chevalley(&self) -> Result<&ChevalleyBasis> {
        cached(&self.chevalley, || ChevalleyBasis::new(&self.rd))
    }

    /// Basic invariants, sorted by degree.
    pub fn invariants(&self) -> Result<&[Poly]> {
        cached(&self.invariants, || invariant_generators(&self.rd)).map(Vec::as_slice)
    }

    pub fn coinvariants(&self) -> Result<&CoinvariantSpace> {
        cached(&self.coinvariants, || {
            Ok(CoinvariantSpace::new(&self.rd, self.invariants()?.to_vec()))
        })
    }

    pub fn generators(&self) -> Result<&[ZheloGenerator]> {
        cached(&self.generators, || {
            let invariants = self.invariants()?;
            let kept = match self.max_degree {
                Some(d) => invariants
                    .iter()
                    .take_while(|q| q.degree().unwrap_or(0) <= d)
                    .count(),
                None => invariants.len(),
            };
            solve_generators(&self.rd.datum, &invariants[..kept])
        })
        .map(Vec::as_slice)
    }

    pub fn monoid(&self) -> Result<&MonoidGraph> {
        cached(&self.monoid, || {
            let top = self
                .invariants()?
                .last()
                .ok_or_else(|| inconsistency("no invariants"))?;
            let q = self.coinvariants()?;
            let p0 = realize_p0(&self.rd, q, top)?;
            Ok(enumerate_monoid(&self.rd, q, &p0))
        })
    }

    /// Fails in type G2.
    pub fn pmap(&self) -> Result<&PMap> {
        cached(&self.pmap, || pmap(&self.rd, self.monoid()?))
    }

    /// Coroot tables of `P` and `P⁰` for every generator, under length-weighted
    /// constants. Fails in type G2.
    pub fn tables(&self) -> Result<(&[PGammaTable], &[PGammaTable])> {
        let (full, lead) = cached(&self.tables, || {
            generator_tables(
                &self.rd,
                self.chevalley()?,
                Normalization::LengthWeighted,
                self.generators()?,
            )
        })?;
        Ok((full, lead))
    }
}
