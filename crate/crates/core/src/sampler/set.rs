use std::collections::BTreeMap;
use std::io::{Read, Write};

use super::params::SamplerParams;
use crate::error::{Error, Result};
use crate::model::{ModelDescriptor, TrapSpec};
use crate::num::Real;
use crate::stats::integrated_autocorrelation;

const FORMAT: &str = "fss-samples-v1";

/// One recorded state of a chain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleRecord<T> {
    pub n0: u32,
    pub energy: T,
    pub chain_id: u32,
    /// Attempted steps taken by the chain when the record was made, burn-in included.
    pub step: u64,
}

/// Energy window applied by post-selection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    /// Mean energy of the parent set the window is centred on.
    pub e_mean: f64,
    /// Width spanned by the retained records, twice the largest distance from `e_mean`.
    pub delta_e: f64,
    pub fraction: f64,
}

/// Per-chain health indicators. Advisory only.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainDiagnostics {
    pub chain_id: u32,
    pub acceptance_rate: f64,
    pub burn_in_acceptance_rate: f64,
    /// Integrated autocorrelation time of `N0`, in records.
    pub tau_n0: f64,
    /// First- and second-half means of `N0` agree within four standard errors.
    pub burn_in_converged: bool,
}

impl ChainDiagnostics {
    pub fn from_records<T: Real>(chain_id: u32, records: &[SampleRecord<T>], acceptance_rate: f64, burn_in_rate: f64) -> Self {
        let n0: Vec<f64> = records.iter().map(|r| f64::from(r.n0)).collect();
        let tau = integrated_autocorrelation(&n0);
        let half = n0.len() / 2;
        let converged = if half < 2 {
            true
        } else {
            let (a, b) = n0.split_at(half);
            let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
            let (ma, mb) = (mean(a), mean(b));
            let m = mean(&n0);
            let var = n0.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n0.len() as f64;
            let se = (var * tau.max(1.0) * (1.0 / a.len() as f64 + 1.0 / b.len() as f64)).sqrt();
            (ma - mb).abs() <= 4.0 * se
        };
        ChainDiagnostics {
            chain_id,
            acceptance_rate,
            burn_in_acceptance_rate: burn_in_rate,
            tau_n0: tau,
            burn_in_converged: converged,
        }
    }
}

/// Records from one or more chains of a single model at a single temperature.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet<T> {
    descriptor: ModelDescriptor,
    params: SamplerParams,
    records: Vec<SampleRecord<T>>,
    diagnostics: Vec<ChainDiagnostics>,
    window: Option<Window>,
}

impl<T: Real> SampleSet<T> {
    pub fn new(
        descriptor: ModelDescriptor,
        params: SamplerParams,
        records: Vec<SampleRecord<T>>,
        diagnostics: Vec<ChainDiagnostics>,
    ) -> Self {
        SampleSet { descriptor, params, records, diagnostics, window: None }
    }

    /// Set built from bare records, for analyses of externally produced data.
    pub fn from_records(descriptor: ModelDescriptor, params: SamplerParams, records: Vec<SampleRecord<T>>) -> Self {
        Self::new(descriptor, params, records, Vec::new())
    }

    pub fn descriptor(&self) -> &ModelDescriptor {
        &self.descriptor
    }

    pub fn params(&self) -> &SamplerParams {
        &self.params
    }

    pub fn records(&self) -> &[SampleRecord<T>] {
        &self.records
    }

    pub fn diagnostics(&self) -> &[ChainDiagnostics] {
        &self.diagnostics
    }

    pub fn window(&self) -> Option<&Window> {
        self.window.as_ref()
    }

    pub(crate) fn with_window(mut self, window: Window) -> Self {
        self.window = Some(window);
        self
    }

    pub(crate) fn with_records(&self, records: Vec<SampleRecord<T>>) -> Self {
        SampleSet {
            descriptor: self.descriptor,
            params: self.params.clone(),
            records,
            diagnostics: self.diagnostics.clone(),
            window: self.window,
        }
    }

    /// Number of records, `W`.
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Distinct chain ids in order of first appearance.
    pub fn chain_ids(&self) -> Vec<u32> {
        let mut seen = Vec::new();
        for r in &self.records {
            if !seen.contains(&r.chain_id) {
                seen.push(r.chain_id);
            }
        }
        seen
    }

    /// Concatenates sets drawn from the same model at the same temperature.
    /// Chain ids are kept. Parameters other than `beta` are taken from the first set.
    pub fn merge(sets: Vec<SampleSet<T>>) -> Result<Self> {
        let mut iter = sets.into_iter();
        let mut out = iter.next().ok_or(Error::EmptySet)?;
        for s in iter {
            let (a, b) = (&out.descriptor, &s.descriptor);
            let field = if a.trap != b.trap {
                Some("trap")
            } else if a.atoms != b.atoms {
                Some("atoms")
            } else if a.coupling != b.coupling {
                Some("coupling")
            } else if a.cutoff != b.cutoff {
                Some("cutoff")
            } else if out.params.beta != s.params.beta {
                Some("beta")
            } else if out.window != s.window {
                Some("window")
            } else {
                None
            };
            if let Some(field) = field {
                return Err(Error::Mismatch { field });
            }
            out.records.extend(s.records);
            out.diagnostics.extend(s.diagnostics);
        }
        Ok(out)
    }

    /// Writes the set as CSV with `# key=value` metadata lines on top.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for (k, v) in self.metadata() {
            writeln!(out, "# {k}={v}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.into());
        w.write_record(["chain_id", "step_index", "N0", "E"]).map_err(io)?;
        for r in &self.records {
            w.write_record([
                r.chain_id.to_string(),
                r.step.to_string(),
                r.n0.to_string(),
                r.energy.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    fn metadata(&self) -> Vec<(&'static str, String)> {
        let d = &self.descriptor;
        let p = &self.params;
        let mut m = vec![("format", FORMAT.to_string()), ("trap", d.trap.kind().to_string())];
        match d.trap {
            TrapSpec::Ring1d { length } => m.push(("length", length.to_string())),
            TrapSpec::Harmonic1d { omega } => m.push(("omega", omega.to_string())),
            TrapSpec::Harmonic3d { aspect_ratio } => m.push(("aspect_ratio", aspect_ratio.to_string())),
        }
        m.extend([
            ("atoms", d.atoms.to_string()),
            ("coupling", d.coupling.to_string()),
            ("cutoff", d.cutoff.to_string()),
            ("beta", p.beta.to_string()),
            ("gamma", p.gamma.to_string()),
            ("burn_in_steps", p.burn_in_steps.to_string()),
            ("thinning", p.thinning.to_string()),
            ("samples_target", p.samples_target.to_string()),
            ("seed", p.seed.to_string()),
            ("chain_count", p.chain_count.to_string()),
        ]);
        if let Some(w) = &self.window {
            m.extend([
                ("window_e_mean", w.e_mean.to_string()),
                ("window_delta_e", w.delta_e.to_string()),
                ("window_fraction", w.fraction.to_string()),
            ]);
        }
        m
    }

    /// Reads a set written by [`SampleSet::write_csv`]. Diagnostics are not stored
    /// in the file and come back empty.
    pub fn read_csv<R: Read>(mut input: R) -> Result<Self> {
        let mut text = String::new();
        input.read_to_string(&mut text)?;
        let mut meta = BTreeMap::new();
        let mut body_start = 0;
        let mut body_line = 1;
        for line in text.split_inclusive('\n') {
            let Some(rest) = line.strip_prefix('#') else { break };
            let (k, v) = rest.trim().split_once('=').ok_or_else(|| Error::Parse {
                line: body_line,
                msg: format!("expected `# key=value`, got `{}`", line.trim_end()),
            })?;
            meta.insert(k.trim().to_string(), v.trim().to_string());
            body_start += line.len();
            body_line += 1;
        }
        let header_lines = body_line - 1;
        let get = |key: &str| -> Result<&str> {
            meta.get(key).map(String::as_str).ok_or_else(|| Error::Parse {
                line: header_lines,
                msg: format!("missing `{key}` in header"),
            })
        };
        fn num<V: std::str::FromStr>(key: &str, v: &str, line: usize) -> Result<V> {
            v.parse().map_err(|_| Error::Parse { line, msg: format!("bad value `{v}` for `{key}`") })
        }
        let h = |key: &str| -> Result<f64> { num(key, get(key)?, header_lines) };
        if get("format")? != FORMAT {
            return Err(Error::Parse { line: 1, msg: format!("unknown format `{}`", get("format")?) });
        }
        let trap = match get("trap")? {
            "ring1d" => TrapSpec::Ring1d { length: h("length")? },
            "harmonic1d" => TrapSpec::Harmonic1d { omega: h("omega")? },
            "harmonic3d" => TrapSpec::Harmonic3d { aspect_ratio: h("aspect_ratio")? },
            other => return Err(Error::Parse { line: header_lines, msg: format!("unknown trap `{other}`") }),
        };
        let descriptor = ModelDescriptor {
            trap,
            atoms: num("atoms", get("atoms")?, header_lines)?,
            coupling: h("coupling")?,
            cutoff: num("cutoff", get("cutoff")?, header_lines)?,
        };
        let params = SamplerParams {
            beta: h("beta")?,
            gamma: h("gamma")?,
            burn_in_steps: num("burn_in_steps", get("burn_in_steps")?, header_lines)?,
            thinning: num("thinning", get("thinning")?, header_lines)?,
            samples_target: num("samples_target", get("samples_target")?, header_lines)?,
            seed: num("seed", get("seed")?, header_lines)?,
            chain_count: num("chain_count", get("chain_count")?, header_lines)?,
        };
        let window = if meta.contains_key("window_e_mean") {
            Some(Window {
                e_mean: h("window_e_mean")?,
                delta_e: h("window_delta_e")?,
                fraction: h("window_fraction")?,
            })
        } else {
            None
        };

        let mut reader = csv::Reader::from_reader(&text.as_bytes()[body_start..]);
        let expected = ["chain_id", "step_index", "N0", "E"];
        let columns = reader.headers().map_err(|e| Error::Parse { line: body_line, msg: e.to_string() })?;
        if columns.iter().ne(expected.iter().copied()) {
            return Err(Error::Parse { line: body_line, msg: format!("expected columns {}", expected.join(",")) });
        }
        let mut records = Vec::new();
        for (i, row) in reader.records().enumerate() {
            let line = body_line + 1 + i;
            let row = row.map_err(|e| Error::Parse { line, msg: e.to_string() })?;
            let energy: f64 = num("E", &row[3], line)?;
            let n0: u32 = num("N0", &row[2], line)?;
            if n0 as usize > descriptor.atoms {
                return Err(Error::Parse { line, msg: format!("N0 = {n0} exceeds the atom number") });
            }
            records.push(SampleRecord {
                chain_id: num("chain_id", &row[0], line)?,
                step: num("step_index", &row[1], line)?,
                n0,
                energy: T::of(energy),
            });
        }
        Ok(SampleSet { descriptor, params, records, diagnostics: Vec::new(), window })
    }
}
