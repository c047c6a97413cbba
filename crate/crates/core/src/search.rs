//! Candidate enumeration, the admissibility pipeline and maximality sweeps.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cone::{cone_trivial, verify_certificate, ConeCertificate};
use crate::json::{biguint_string, to_canonical_string};
use crate::progressions::{build_constraint_system, enumerate_progressions};
use crate::reducibility::{digit_reduce_table, matrix_reduce, DigitTrace, MatrixTrace, Verdict};
use crate::zp::{equation_classes, normalize_digit_set, DigitSetPair, LineEquation, Prime};
use crate::{CapError, Result};

/// Candidates handled per parallel batch. Fixed so that early stops, and
/// hence reports, do not depend on the worker count.
const CHUNK: usize = 256;

/// Ascending `size`-subsets of `Z_p` containing `0` and `1`, in
/// lexicographic order. With `dedup` only sets equal to their own affine
/// normal form are kept.
pub fn candidates(p: Prime, size: usize, dedup: bool) -> Result<Vec<Vec<u32>>> {
    let pv = p.get() as usize;
    if size < 2 || size > pv - 1 {
        return Err(CapError::Precondition(format!("candidate size {size} outside 2..={}", pv - 1)));
    }
    let k = size - 2;
    let pool: Vec<u32> = (2..p.get()).collect();
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let mut set = vec![0, 1];
        set.extend(idx.iter().map(|&i| pool[i]));
        if !dedup || normalize_digit_set(p, &set) == set {
            out.push(set);
        }
        // Next combination.
        let Some(i) = (0..k).rev().find(|&i| idx[i] < pool.len() - k + i) else {
            break;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum Evidence {
    Digit { trace: DigitTrace },
    Matrix { trace: MatrixTrace },
    Cone { certificate: ConeCertificate },
}

impl Evidence {
    pub fn method(&self) -> &'static str {
        match self {
            Evidence::Digit { .. } => "digit",
            Evidence::Matrix { .. } => "matrix",
            Evidence::Cone { .. } => "cone",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepresentativeEvidence {
    pub equation: LineEquation,
    pub trivial: bool,
    pub evidence: Evidence,
}

/// Self-contained record of a pair check; see [`verify_bundle`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateBundle {
    pub pair: DigitSetPair,
    pub admissible: bool,
    pub representatives: Vec<RepresentativeEvidence>,
}

/// Digit reduction, then matrix reduction, then the cone test.
pub fn check_representative(pair: &DigitSetPair, eq: LineEquation) -> RepresentativeEvidence {
    let table = enumerate_progressions(pair, eq);
    let digit = digit_reduce_table(&table);
    if digit.verdict == Verdict::ReducedToEmpty {
        return RepresentativeEvidence { equation: eq, trivial: true, evidence: Evidence::Digit { trace: digit } };
    }
    let system = build_constraint_system(&table);
    let matrix = matrix_reduce(&system);
    if matrix.verdict == Verdict::ReducedToEmpty {
        return RepresentativeEvidence { equation: eq, trivial: true, evidence: Evidence::Matrix { trace: matrix } };
    }
    let certificate = cone_trivial(&system);
    RepresentativeEvidence { equation: eq, trivial: certificate.is_trivial(), evidence: Evidence::Cone { certificate } }
}

/// Runs the pipeline on every equation-class representative in order.
/// With `short_circuit` the first refuted representative ends the check.
pub fn check_pair(pair: &DigitSetPair, short_circuit: bool) -> CertificateBundle {
    let mut representatives = Vec::new();
    let mut admissible = true;
    for eq in equation_classes(pair.p()).representatives() {
        let ev = check_representative(pair, eq);
        admissible &= ev.trivial;
        representatives.push(ev);
        if !admissible && short_circuit {
            break;
        }
    }
    CertificateBundle { pair: pair.clone(), admissible, representatives }
}

/// Re-derives every claim in a bundle from the pair alone: digit traces are
/// replayed, matrix traces recomputed, cone certificates checked, and an
/// admissible verdict must cover every class representative.
pub fn verify_bundle(bundle: &CertificateBundle) -> Result<bool> {
    let pair = &bundle.pair;
    let reps: Vec<LineEquation> = equation_classes(pair.p()).representatives().collect();
    for ev in &bundle.representatives {
        if !verify_evidence(pair, ev)? {
            return Ok(false);
        }
    }
    let all_trivial = bundle.representatives.iter().all(|e| e.trivial);
    let covered: Vec<LineEquation> = bundle.representatives.iter().map(|e| e.equation).collect();
    Ok(if bundle.admissible { all_trivial && covered == reps } else { !all_trivial })
}

pub fn verify_evidence(pair: &DigitSetPair, ev: &RepresentativeEvidence) -> Result<bool> {
    let eq = ev.equation;
    if eq.p() != pair.p() {
        return Ok(false);
    }
    let table = enumerate_progressions(pair, eq);
    Ok(match &ev.evidence {
        Evidence::Digit { trace } => {
            ev.trivial && trace.equation == eq && trace.verdict == Verdict::ReducedToEmpty && trace.verify(&table).is_ok()
        }
        Evidence::Matrix { trace } => {
            let system = build_constraint_system(&table);
            ev.trivial && trace.equation == eq && trace.verdict == Verdict::ReducedToEmpty && trace.verify(&system).is_ok()
        }
        Evidence::Cone { certificate } => {
            let system = build_constraint_system(&table);
            ev.trivial == certificate.is_trivial() && verify_certificate(&system, certificate)?
        }
    })
}

/// An inadmissible candidate: a nonzero cone point for `(D, D)` and one
/// representative equation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refutation {
    pub digits: Vec<u32>,
    pub equation: LineEquation,
    #[serde(serialize_with = "biguint_string::serialize_vec", deserialize_with = "biguint_string::deserialize_vec")]
    pub witness: Vec<BigUint>,
}

impl Refutation {
    pub fn verify(&self, p: Prime) -> Result<bool> {
        let pair = DigitSetPair::all_fixed(p, &self.digits)?;
        let system = build_constraint_system(&enumerate_progressions(&pair, self.equation));
        verify_certificate(&system, &ConeCertificate::Nontrivial { witness: self.witness.clone() })
    }

    fn from_bundle(bundle: &CertificateBundle) -> Option<Self> {
        bundle.representatives.iter().find_map(|ev| match &ev.evidence {
            Evidence::Cone { certificate: ConeCertificate::Nontrivial { witness } } => {
                Some(Refutation { digits: bundle.pair.digits().to_vec(), equation: ev.equation, witness: witness.clone() })
            }
            _ => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibleEntry {
    pub digits: Vec<u32>,
    /// Smallest fixed-digit set found admissible, when minimization ran.
    pub minimal_fixed: Option<Vec<u32>>,
    pub bundle: CertificateBundle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelReport {
    pub size: usize,
    pub candidates_examined: u64,
    /// First admissible candidate in enumeration order, if any.
    pub admissible: Option<AdmissibleEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Maximality {
    /// Every candidate of size `size` is refuted.
    Proven {
        size: usize,
        refutations: Vec<Refutation>,
    },
    NotAttempted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub p: Prime,
    /// Largest size with an admissible candidate.
    pub max_size: usize,
    pub candidates_examined: u64,
    pub dedup: bool,
    pub levels: Vec<LevelReport>,
    pub maximality: Maximality,
    pub budget_exhausted: bool,
}

impl SearchReport {
    pub fn is_proven(&self) -> bool {
        matches!(self.maximality, Maximality::Proven { .. })
    }
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub seconds: Option<f64>,
    pub max_candidates: Option<u64>,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    pub dedup: bool,
    /// Directory holding `checkpoint.jsonl` and `certs/`.
    pub checkpoint: Option<PathBuf>,
    pub minimize: bool,
    pub min_size: usize,
    pub max_size: Option<usize>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            seconds: None,
            max_candidates: None,
            workers: None,
            dedup: false,
            checkpoint: None,
            minimize: false,
            min_size: 2,
            max_size: None,
        }
    }
}

/// One line of `checkpoint.jsonl`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckpointLine {
    pub p: u32,
    pub digits: Vec<u32>,
    pub admissible: bool,
    pub evidence: Vec<EvidenceRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceRef {
    pub b: u32,
    pub method: String,
    /// sha256 of the canonical JSON of the evidence, also its file stem.
    pub certificate: String,
}

/// Content-addressed store of [`RepresentativeEvidence`] files.
pub struct CertStore {
    dir: PathBuf,
}

impl CertStore {
    pub fn open(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(CertStore { dir: dir.to_path_buf() })
    }

    pub fn put(&self, ev: &RepresentativeEvidence) -> Result<String> {
        let text = to_canonical_string(ev)?;
        let hash = hex::encode(Sha256::digest(text.as_bytes()));
        let path = self.dir.join(format!("{hash}.json"));
        if !path.exists() {
            fs::write(&path, text)?;
        }
        Ok(hash)
    }

    pub fn get(&self, hash: &str) -> Result<RepresentativeEvidence> {
        let text = fs::read_to_string(self.dir.join(format!("{hash}.json")))?;
        let actual = hex::encode(Sha256::digest(text.as_bytes()));
        if actual != hash {
            return Err(CapError::Parse(format!("certificate {hash} does not match its content hash")));
        }
        Ok(serde_json::from_str(&text)?)
    }
}

struct Checkpoint {
    file: File,
    store: CertStore,
    done: HashMap<Vec<u32>, CheckpointLine>,
}

impl Checkpoint {
    fn open(dir: &Path, p: Prime) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let path = dir.join("checkpoint.jsonl");
        let mut done = HashMap::new();
        if path.exists() {
            for line in BufReader::new(File::open(&path)?).lines() {
                // A torn final line from an interrupted run is dropped.
                let Ok(entry) = serde_json::from_str::<CheckpointLine>(&line?) else {
                    continue;
                };
                if entry.p == p.get() {
                    done.insert(entry.digits.clone(), entry);
                }
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(Checkpoint { file, store: CertStore::open(&dir.join("certs"))?, done })
    }

    fn lookup(&self, pair: &DigitSetPair) -> Result<Option<CertificateBundle>> {
        let Some(line) = self.done.get(pair.digits()) else {
            return Ok(None);
        };
        let representatives = line.evidence.iter().map(|r| self.store.get(&r.certificate)).collect::<Result<Vec<_>>>()?;
        Ok(Some(CertificateBundle { pair: pair.clone(), admissible: line.admissible, representatives }))
    }

    fn record(&mut self, bundle: &CertificateBundle) -> Result<()> {
        let evidence = bundle
            .representatives
            .iter()
            .map(|ev| Ok(EvidenceRef { b: ev.equation.b(), method: ev.evidence.method().to_string(), certificate: self.store.put(ev)? }))
            .collect::<Result<Vec<_>>>()?;
        let line =
            CheckpointLine { p: bundle.pair.p().get(), digits: bundle.pair.digits().to_vec(), admissible: bundle.admissible, evidence };
        writeln!(self.file, "{}", to_canonical_string(&line)?)?;
        self.done.insert(line.digits.clone(), line);
        Ok(())
    }

    fn flush(&mut self) -> Result<()> {
        self.file.flush()?;
        Ok(())
    }
}

enum LevelOutcome {
    Found(CertificateBundle, u64),
    AllRefuted(Vec<Refutation>, u64),
    Exhausted(u64),
}

struct Sweep<'a> {
    p: Prime,
    config: &'a SearchConfig,
    start: Instant,
    examined: u64,
    checkpoint: Option<Checkpoint>,
}

impl Sweep<'_> {
    fn out_of_budget(&self) -> bool {
        self.config.seconds.is_some_and(|s| self.start.elapsed().as_secs_f64() >= s)
            || self.config.max_candidates.is_some_and(|m| self.examined >= m)
    }

    fn level(&mut self, size: usize) -> Result<LevelOutcome> {
        let sets = candidates(self.p, size, self.config.dedup)?;
        let mut refutations = Vec::new();
        let mut level_examined = 0u64;
        for chunk in sets.chunks(CHUNK) {
            if self.out_of_budget() {
                return Ok(LevelOutcome::Exhausted(level_examined));
            }
            let room = self.config.max_candidates.map_or(chunk.len(), |m| (m - self.examined).min(chunk.len() as u64) as usize);
            let truncated = room < chunk.len();
            let chunk = &chunk[..room];
            let pairs: Vec<DigitSetPair> = chunk.iter().map(|d| DigitSetPair::all_fixed(self.p, d)).collect::<Result<_>>()?;
            let mut cached = Vec::with_capacity(pairs.len());
            for pair in &pairs {
                cached.push(match &self.checkpoint {
                    Some(cp) => cp.lookup(pair)?,
                    None => None,
                });
            }
            let bundles: Vec<(CertificateBundle, bool)> = pairs
                .par_iter()
                .zip(cached)
                .map(|(pair, hit)| match hit {
                    Some(b) => (b, false),
                    None => (check_pair(pair, true), true),
                })
                .collect();
            if let Some(cp) = self.checkpoint.as_mut() {
                for (bundle, fresh) in &bundles {
                    if *fresh {
                        cp.record(bundle)?;
                    }
                }
                cp.flush()?;
            }
            for (bundle, _) in bundles {
                self.examined += 1;
                level_examined += 1;
                if bundle.admissible {
                    return Ok(LevelOutcome::Found(bundle, level_examined));
                }
                refutations.push(Refutation::from_bundle(&bundle).ok_or_else(|| {
                    CapError::Precondition(format!("inadmissible bundle for {:?} lacks a cone witness", bundle.pair.digits()))
                })?);
            }
            if truncated {
                return Ok(LevelOutcome::Exhausted(level_examined));
            }
        }
        Ok(LevelOutcome::AllRefuted(refutations, level_examined))
    }
}

/// Ascending sweep over candidate sizes with `D' = D`. Each level stops at
/// its first admissible candidate; the first level where every candidate
/// is refuted proves maximality, since subsets of admissible sets are
/// admissible.
pub fn max_admissible_size(p: Prime, config: &SearchConfig) -> Result<SearchReport> {
    match config.workers {
        Some(n) => {
            let pool =
                rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| CapError::Precondition(format!("thread pool: {e}")))?;
            pool.install(|| sweep(p, config))
        }
        None => sweep(p, config),
    }
}

fn sweep(p: Prime, config: &SearchConfig) -> Result<SearchReport> {
    let checkpoint = config.checkpoint.as_deref().map(|d| Checkpoint::open(d, p)).transpose()?;
    let mut sw = Sweep { p, config, start: Instant::now(), examined: 0, checkpoint };
    let top = config.max_size.unwrap_or(p.get() as usize - 1).min(p.get() as usize - 1);
    let mut levels = Vec::new();
    let mut max_size = 0;
    let mut maximality = Maximality::NotAttempted;
    let mut budget_exhausted = false;
    for size in config.min_size.max(2)..=top {
        match sw.level(size)? {
            LevelOutcome::Found(bundle, n) => {
                let minimal_fixed =
                    if config.minimize { Some(minimize_fixed_digits(p, bundle.pair.digits())?.fixed().to_vec()) } else { None };
                let digits = bundle.pair.digits().to_vec();
                levels.push(LevelReport {
                    size,
                    candidates_examined: n,
                    admissible: Some(AdmissibleEntry { digits, minimal_fixed, bundle }),
                });
                max_size = size;
            }
            LevelOutcome::AllRefuted(refutations, n) => {
                levels.push(LevelReport { size, candidates_examined: n, admissible: None });
                maximality = Maximality::Proven { size, refutations };
                break;
            }
            LevelOutcome::Exhausted(n) => {
                levels.push(LevelReport { size, candidates_examined: n, admissible: None });
                budget_exhausted = true;
                break;
            }
        }
    }
    Ok(SearchReport { p, max_size, candidates_examined: sw.examined, dedup: config.dedup, levels, maximality, budget_exhausted })
}

/// Smallest `D' ⊆ D` (by size, then lexicographically) with `(D, D')`
/// admissible. Requires `(D, D)` admissible.
pub fn minimize_fixed_digits(p: Prime, digits: &[u32]) -> Result<DigitSetPair> {
    let full = DigitSetPair::all_fixed(p, digits)?;
    if !check_pair(&full, true).admissible {
        return Err(CapError::Precondition(format!("({:?}, D) is not admissible", full.digits())));
    }
    let d = full.digits();
    for k in 0..=d.len() {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let fixed: Vec<u32> = idx.iter().map(|&i| d[i]).collect();
            let pair = full.with_fixed(&fixed)?;
            if check_pair(&pair, true).admissible {
                return Ok(pair);
            }
            let Some(i) = (0..k).rev().find(|&i| idx[i] < d.len() - k + i) else {
                break;
            };
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    unreachable!("(D, D) was checked admissible")
}
