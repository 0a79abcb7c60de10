use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use crate::dynamics::nonlinearity::{NonlinearityKind, NonlinearitySpec};
use crate::error::{invalid, Error, Result};
use crate::grid::{read_snapshot, write_snapshot, Exponent, Field, GridSpec};

pub const MANIFEST_FILE: &str = "manifest.txt";

/// Time-ordered snapshots of one solution.
///
/// `dt` is the integrator step; snapshots are `stride` steps apart except
/// possibly the last one, which always sits at the final time.
#[derive(Clone, Debug)]
pub struct Trajectory {
    spec: GridSpec,
    times: Vec<f64>,
    fields: Vec<Field>,
    fspec: NonlinearitySpec,
    dt: f64,
    stride: usize,
}

impl Trajectory {
    pub fn new(
        times: Vec<f64>,
        fields: Vec<Field>,
        fspec: NonlinearitySpec,
        dt: f64,
        stride: usize,
    ) -> Result<Self> {
        if fields.is_empty() || fields.len() != times.len() {
            return Err(invalid(format!(
                "trajectory needs matching nonempty times/fields, got {} and {}",
                times.len(),
                fields.len()
            )));
        }
        if !(dt > 0.0) || stride == 0 {
            return Err(invalid("trajectory step and stride must be positive"));
        }
        if times[0] != 0.0 {
            return Err(invalid(format!("trajectory must start at t = 0, got {}", times[0])));
        }
        let gap = dt * stride as f64;
        for w in times.windows(2) {
            let d = w[1] - w[0];
            if !(d > 0.0) || d > gap * (1.0 + 1e-9) {
                return Err(invalid(format!("snapshot gap {d} inconsistent with step {gap}")));
            }
        }
        let spec = *fields[0].spec();
        let mut fields = fields;
        for (f, &t) in fields.iter_mut().zip(&times) {
            spec.check_same(f.spec())?;
            f.set_time(Some(t));
        }
        Ok(Self { spec, times, fields, fspec, dt, stride })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn fields(&self) -> &[Field] {
        &self.fields
    }

    pub fn fspec(&self) -> &NonlinearitySpec {
        &self.fspec
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    /// Nominal spacing between snapshots.
    pub fn sample_dt(&self) -> f64 {
        self.dt * self.stride as f64
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn initial(&self) -> &Field {
        &self.fields[0]
    }

    pub fn last(&self) -> &Field {
        self.fields.last().unwrap()
    }

    /// Index of the snapshot closest to `t`.
    pub fn nearest_index(&self, t: f64) -> usize {
        let mut best = 0;
        for (k, &s) in self.times.iter().enumerate() {
            if (s - t).abs() < (self.times[best] - t).abs() {
                best = k;
            }
        }
        best
    }

    /// Snapshot-wise `self - other`.
    pub fn difference(&self, other: &Trajectory) -> Result<Trajectory> {
        self.spec.check_same(&other.spec)?;
        if self.times.len() != other.times.len()
            || self.times.iter().zip(&other.times).any(|(a, b)| (a - b).abs() > 1e-12 * (1.0 + a.abs()))
        {
            return Err(Error::GridMismatch("trajectories sampled at different times".into()));
        }
        let fields = self
            .fields
            .iter()
            .zip(&other.fields)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        Trajectory::new(self.times.clone(), fields, self.fspec, self.dt, self.stride)
    }

    pub fn manifest_text(&self) -> String {
        let mut s = String::new();
        let kv = [
            ("n", self.spec.dim().to_string()),
            ("m", self.spec.points_per_axis().to_string()),
            ("X", fmt_f64(self.spec.half_width())),
            ("dt", fmt_f64(self.dt)),
            ("T", fmt_f64(self.final_time())),
            ("fspec.kind", self.fspec.kind.name().to_string()),
            ("lambda", fmt_f64(self.fspec.lambda)),
            ("p", fmt_f64(self.fspec.p)),
            ("stride", self.stride.to_string()),
            ("snapshots", self.len().to_string()),
        ];
        for (k, v) in kv {
            s.push_str(k);
            s.push('=');
            s.push_str(&v);
            s.push('\n');
        }
        s
    }

    /// Writes `manifest.txt` and one snapshot file per stored time.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(MANIFEST_FILE), self.manifest_text())?;
        for (k, f) in self.fields.iter().enumerate() {
            let file = fs::File::create(dir.join(snapshot_name(k)))?;
            let mut w = BufWriter::new(file);
            write_snapshot(f, &mut w)?;
            w.flush()?;
        }
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Trajectory> {
        let text = fs::read_to_string(dir.join(MANIFEST_FILE))?;
        let get = |key: &str| -> Result<&str> {
            text.lines()
                .filter_map(|l| l.split_once('='))
                .find(|(k, _)| k.trim() == key)
                .map(|(_, v)| v.trim())
                .ok_or_else(|| Error::SnapshotFormat(format!("manifest lacks key '{key}'")))
        };
        let num = |key: &str| -> Result<f64> {
            get(key)?
                .parse::<f64>()
                .map_err(|e| Error::SnapshotFormat(format!("manifest key '{key}': {e}")))
        };
        let int = |key: &str| -> Result<usize> {
            get(key)?
                .parse::<usize>()
                .map_err(|e| Error::SnapshotFormat(format!("manifest key '{key}': {e}")))
        };
        let spec = GridSpec::new(int("n")?, int("m")?, num("X")?)?;
        let kind = NonlinearityKind::parse(get("fspec.kind")?)?;
        let fspec = NonlinearitySpec { kind, lambda: num("lambda")?, p: num("p")? };
        let count = int("snapshots")?;
        let mut times = Vec::with_capacity(count);
        let mut fields = Vec::with_capacity(count);
        for k in 0..count {
            let file = fs::File::open(dir.join(snapshot_name(k)))?;
            let f = read_snapshot(BufReader::new(file))?;
            spec.check_same(f.spec())?;
            let t = f
                .time()
                .ok_or_else(|| Error::SnapshotFormat(format!("snapshot {k} has no time tag")))?;
            times.push(t);
            fields.push(f);
        }
        Trajectory::new(times, fields, fspec, num("dt")?, int("stride")?)
    }
}

fn snapshot_name(k: usize) -> String {
    format!("snap_{k:05}.hobs")
}

fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// `M`: the largest sup norm over the stored snapshots.
pub fn sup_norm_bound(traj: &Trajectory) -> f64 {
    traj.fields()
        .iter()
        .map(|f| f.lp_norm(Exponent::Infinity).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max)
}
