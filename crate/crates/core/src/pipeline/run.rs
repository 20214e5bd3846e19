use std::time::Instant;

use num_bigint::BigInt;

use crate::error::PipelineError;
use crate::moddet::det_grid;
use crate::ntt::{transform_multi, Direction, TwiddleTable};
use crate::polytensor::{CoeffTensor, PolyMatrix};
use crate::reconstruct::{combine_slices, CrtBasis};
use crate::scalar::IntCoeff;
use crate::text::{format_matrix, parse_matrix};

use super::plan::{plan, Plan};
use super::workspace::{
    decode_integers, decode_residues, encode_integers, encode_residues, sha256_hex, LedgerEntry, Manifest, Workspace,
    MANIFEST_FORMAT,
};
use super::{Config, Determinant, StageTimes};

/// Result of a pipeline run.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub determinant: Determinant,
    pub plan: Plan,
    pub times: StageTimes,
    /// Units computed in this invocation.
    pub computed: usize,
    /// Units restored from the workspace.
    pub restored: usize,
}

/// Checkpoint bookkeeping for one invocation.
struct Ledger<'w> {
    ws: Option<(&'w Workspace, Manifest)>,
    budget: Option<usize>,
    computed: usize,
    restored: usize,
}

impl<'w> Ledger<'w> {
    fn lookup(&mut self, unit: &str) -> Result<Option<Vec<u8>>, PipelineError> {
        let Some((ws, manifest)) = &self.ws else { return Ok(None) };
        match manifest.find(unit) {
            Some(entry) => {
                let bytes = ws.read_artifact(entry)?;
                self.restored += 1;
                Ok(Some(bytes))
            }
            None => Ok(None),
        }
    }

    /// Called before computing a unit; fails once the interruption budget
    /// is spent.
    fn begin(&mut self) -> Result<(), PipelineError> {
        if self.budget.is_some_and(|b| self.computed >= b) {
            return Err(PipelineError::Interrupted { completed: self.computed });
        }
        self.computed += 1;
        Ok(())
    }

    fn record(&mut self, unit: &str, bytes: &[u8]) -> Result<(), PipelineError> {
        let Some((ws, manifest)) = &mut self.ws else { return Ok(()) };
        let file = format!("{}.bin", unit.replace('/', "-"));
        let sha256 = ws.write_artifact(&file, bytes)?;
        manifest.ledger.push(LedgerEntry { unit: unit.to_string(), file, sha256 });
        ws.save_manifest(manifest)
    }

    fn finish(&mut self) -> Result<(), PipelineError> {
        let Some((ws, manifest)) = &mut self.ws else { return Ok(()) };
        manifest.complete = true;
        ws.save_manifest(manifest)
    }
}

fn input_hash(input_text: &str, config: &Config) -> String {
    let c = config.stored();
    sha256_hex(format!("{input_text}\nstart={};min={};limit={}", c.prime_start, c.min_primes, c.scan_limit).as_bytes())
}

/// Computes the exact determinant, checkpointing into `workspace` when one
/// is given. An existing workspace must belong to the same input and
/// planning configuration; its completed units are reused.
pub fn run<T: IntCoeff>(
    m: &PolyMatrix<T>,
    config: &Config,
    workspace: Option<&Workspace>,
) -> Result<RunOutput, PipelineError> {
    let plan = plan(m, config)?;
    let input_text = format_matrix(m);
    let ledger = match workspace {
        None => Ledger { ws: None, budget: config.interrupt_after, computed: 0, restored: 0 },
        Some(ws) => {
            let hash = input_hash(&input_text, config);
            let manifest = match ws.load_manifest()? {
                Some(existing) => {
                    if existing.input_hash != hash {
                        return Err(PipelineError::StaleWorkspace(
                            "workspace was created for a different input or configuration".into(),
                        ));
                    }
                    if existing.plan_hash != plan.hash() {
                        return Err(PipelineError::StaleWorkspace("workspace plan differs from current plan".into()));
                    }
                    existing
                }
                None => {
                    ws.write_input(&input_text)?;
                    let manifest = Manifest {
                        format: MANIFEST_FORMAT,
                        input_hash: hash,
                        plan_hash: plan.hash(),
                        config: config.stored(),
                        primes: plan.primes.iter().map(|s| s.p).collect(),
                        shape: plan.shape.clone(),
                        ledger: Vec::new(),
                        complete: false,
                    };
                    ws.save_manifest(&manifest)?;
                    manifest
                }
            };
            Ledger { ws: Some((ws, manifest)), budget: config.interrupt_after, computed: 0, restored: 0 }
        }
    };
    let pool = config.schedule.pool()?;
    pool.install(|| execute(m, plan, config, ledger))
}

/// Continues the run recorded in `workspace`, reading the input back from it.
pub fn resume(workspace: &Workspace, config: &Config) -> Result<RunOutput, PipelineError> {
    let manifest = workspace
        .load_manifest()?
        .ok_or_else(|| PipelineError::StaleWorkspace(format!("no manifest in {}", workspace.root().display())))?;
    let text = workspace.read_input()?;
    if input_hash(&text, &config.with_stored(&manifest.config)) != manifest.input_hash {
        return Err(PipelineError::StaleWorkspace("stored input does not match manifest".into()));
    }
    let m = parse_matrix(&text).map_err(|e| PipelineError::CheckpointInvalid(format!("stored input: {e}")))?;
    run(&m, &config.with_stored(&manifest.config), Some(workspace))
}

fn execute<T: IntCoeff>(
    m: &PolyMatrix<T>,
    plan: Plan,
    config: &Config,
    mut ledger: Ledger<'_>,
) -> Result<RunOutput, PipelineError> {
    let mut times = StageTimes::default();
    let shape = plan.shape.clone();
    let nodes = plan.nodes();
    let sched = &config.schedule;

    if let Some(bytes) = ledger.lookup("crt")? {
        let (stored_shape, coeffs) = decode_integers(&bytes)?;
        check_shape(&stored_shape, &shape, "crt")?;
        let tensor = CoeffTensor::from_parts(shape.clone(), (0..shape.len()).collect(), coeffs)?;
        return Ok(RunOutput {
            determinant: Determinant::new(plan.vars.clone(), tensor),
            computed: ledger.computed,
            restored: ledger.restored,
            plan,
            times,
        });
    }

    let mut residues: Vec<Vec<u64>> = Vec::with_capacity(plan.primes.len());
    for (pi, prime) in plan.primes.iter().enumerate() {
        let p = prime.p;
        let ifft_unit = format!("ifft/{pi}");
        if let Some(bytes) = ledger.lookup(&ifft_unit)? {
            residues.push(load_residues(&bytes, &shape, p, &ifft_unit)?);
            continue;
        }
        let table = TwiddleTable::with_max_log(prime, plan.q_max)?;
        let det_unit = format!("det/{pi}");
        let values = match ledger.lookup(&det_unit)? {
            Some(bytes) => load_residues(&bytes, &shape, p, &det_unit)?,
            None => {
                let mut grids = Vec::with_capacity(m.unique_count());
                for u in 0..m.unique_count() {
                    let unit = format!("fft/{pi}/{u}");
                    if let Some(bytes) = ledger.lookup(&unit)? {
                        grids.push(load_residues(&bytes, &shape, p, &unit)?);
                        continue;
                    }
                    ledger.begin()?;
                    let start = Instant::now();
                    let coeffs = m.unique_entry(u).to_tensor(&shape)?.reduce_mod(prime);
                    let grid = transform_multi(
                        coeffs.tensor.into_coeffs(),
                        &shape,
                        &table,
                        Direction::Forward,
                        sched.chunk_rows,
                    )?;
                    times.fft += start.elapsed();
                    ledger.record(&unit, &encode_residues(&shape, p, &grid))?;
                    grids.push(grid);
                }
                ledger.begin()?;
                let start = Instant::now();
                let values = det_grid(&grids, m.dedup_map(), m.order(), prime, sched.chunk_nodes)?;
                times.det += start.elapsed();
                ledger.record(&det_unit, &encode_residues(&shape, p, &values))?;
                values
            }
        };
        ledger.begin()?;
        let start = Instant::now();
        let coeffs = transform_multi(values, &shape, &table, Direction::Inverse, sched.chunk_rows)?;
        times.ifft += start.elapsed();
        debug_assert_eq!(coeffs.len(), nodes);
        ledger.record(&ifft_unit, &encode_residues(&shape, p, &coeffs))?;
        residues.push(coeffs);
    }

    ledger.begin()?;
    let start = Instant::now();
    let basis = CrtBasis::new(&plan.primes.iter().map(|s| s.p).collect::<Vec<_>>())?;
    let slices: Vec<&[u64]> = residues.iter().map(Vec::as_slice).collect();
    let coeffs: Vec<BigInt> = combine_slices(&slices, &basis, sched.chunk_coeffs)?;
    times.crt += start.elapsed();
    ledger.record("crt", &encode_integers(&shape, &coeffs))?;
    ledger.finish()?;

    let tensor = CoeffTensor::from_parts(shape.clone(), (0..shape.len()).collect(), coeffs)?;
    Ok(RunOutput {
        determinant: Determinant::new(plan.vars.clone(), tensor),
        computed: ledger.computed,
        restored: ledger.restored,
        plan,
        times,
    })
}

fn check_shape(found: &[usize], expected: &[usize], unit: &str) -> Result<(), PipelineError> {
    if found != expected {
        return Err(PipelineError::CheckpointInvalid(format!(
            "unit {unit} has shape {found:?}, expected {expected:?}"
        )));
    }
    Ok(())
}

fn load_residues(bytes: &[u8], shape: &[usize], p: u64, unit: &str) -> Result<Vec<u64>, PipelineError> {
    let (found, modulus, values) = decode_residues(bytes)?;
    check_shape(&found, shape, unit)?;
    if modulus != p {
        return Err(PipelineError::CheckpointInvalid(format!("unit {unit} stored mod {modulus}, expected {p}")));
    }
    Ok(values)
}
