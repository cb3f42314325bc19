use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitCalibration {
    pub t1_us: f64,
    pub t2_us: f64,
    pub gate_time_ns: f64,
    pub gate_error: f64,
    pub readout_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingCalibration {
    pub gate_time_ns: f64,
    pub gate_error: f64,
}

/// Per-qubit and per-coupling device calibration.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NoiseModel {
    qubits: BTreeMap<usize, QubitCalibration>,
    couplings: BTreeMap<(usize, usize), CouplingCalibration>,
}

const PERTH_QUBITS: [(f64, f64, f64, f64, f64); 7] = [
    (9.6, 16.47, 35.56, 0.0007, 0.0220),
    (150.65, 55.92, 35.56, 0.0003, 0.0232),
    (120.61, 103.28, 35.56, 0.0002, 0.0205),
    (169.23, 151.85, 35.56, 0.0003, 0.0176),
    (159.29, 117.10, 35.56, 0.0005, 0.0178),
    (187.23, 140.95, 35.56, 0.0003, 0.0240),
    (163.37, 180.04, 35.56, 0.0002, 0.0060),
];

const PERTH_COUPLINGS: [(usize, usize, f64, f64); 12] = [
    (0, 1, 391.11, 0.0129),
    (1, 0, 426.67, 0.0129),
    (1, 2, 355.56, 0.0052),
    (1, 3, 405.33, 0.0145),
    (2, 1, 320.00, 0.0052),
    (3, 1, 369.78, 0.0145),
    (3, 5, 284.44, 0.0086),
    (4, 5, 590.22, 0.0103),
    (5, 3, 320.00, 0.0086),
    (5, 4, 625.78, 0.0103),
    (5, 6, 640.00, 0.0102),
    (6, 5, 604.44, 0.0102),
];

/// Qubits 7..=11 copy qubits 2..=6.
const MIRROR_OFFSET: usize = 5;

/// Physical qubits used for six logical qubits on the mirrored device.
pub const SIX_QUBIT_MAPPING: [usize; 6] = [0, 1, 2, 7, 9, 10];

impl NoiseModel {
    /// Seven-qubit calibration snapshot extended to twelve qubits by mirroring qubits 2–6.
    pub fn builtin() -> Self {
        let mut m = NoiseModel::default();
        for (q, &(t1, t2, t, e, ro)) in PERTH_QUBITS.iter().enumerate() {
            let cal = QubitCalibration {
                t1_us: t1,
                t2_us: t2,
                gate_time_ns: t,
                gate_error: e,
                readout_error: ro,
            };
            m.qubits.insert(q, cal);
            if q >= 2 {
                m.qubits.insert(q + MIRROR_OFFSET, cal);
            }
        }
        for &(c, t, time, e) in &PERTH_COUPLINGS {
            let cal = CouplingCalibration {
                gate_time_ns: time,
                gate_error: e,
            };
            m.couplings.insert((c, t), cal);
            if c >= 2 && t >= 2 {
                m.couplings.insert((c + MIRROR_OFFSET, t + MIRROR_OFFSET), cal);
            }
        }
        m
    }

    /// Infinite coherence times, zero gate and readout error.
    pub fn noiseless(num_qubits: usize) -> Self {
        let mut m = NoiseModel::default();
        for q in 0..num_qubits {
            m.qubits.insert(
                q,
                QubitCalibration {
                    t1_us: f64::INFINITY,
                    t2_us: f64::INFINITY,
                    gate_time_ns: 0.0,
                    gate_error: 0.0,
                    readout_error: 0.0,
                },
            );
        }
        m
    }

    pub fn insert_qubit(&mut self, q: usize, cal: QubitCalibration) -> Result<()> {
        let ok = cal.t1_us > 0.0
            && cal.t2_us > 0.0
            && cal.gate_time_ns >= 0.0
            && (0.0..=1.0).contains(&cal.gate_error)
            && (0.0..=1.0).contains(&cal.readout_error);
        if !ok {
            return Err(Error::NoiseModel(format!("invalid calibration for qubit {q}: {cal:?}")));
        }
        self.qubits.insert(q, cal);
        Ok(())
    }

    pub fn insert_coupling(&mut self, control: usize, target: usize, cal: CouplingCalibration) -> Result<()> {
        if control == target {
            return Err(Error::NoiseModel(format!("coupling {control}->{target} is not a pair")));
        }
        for q in [control, target] {
            if !self.qubits.contains_key(&q) {
                return Err(Error::NoiseModel(format!(
                    "coupling endpoint {q} has no qubit calibration"
                )));
            }
        }
        if cal.gate_time_ns < 0.0 || !(0.0..=1.0).contains(&cal.gate_error) {
            return Err(Error::NoiseModel(format!(
                "invalid coupling {control}->{target}: {cal:?}"
            )));
        }
        self.couplings.insert((control, target), cal);
        Ok(())
    }

    pub fn qubit(&self, q: usize) -> Option<&QubitCalibration> {
        self.qubits.get(&q)
    }

    pub fn qubits(&self) -> impl Iterator<Item = (usize, &QubitCalibration)> {
        self.qubits.iter().map(|(&q, c)| (q, c))
    }

    pub fn couplings(&self) -> impl Iterator<Item = ((usize, usize), &CouplingCalibration)> {
        self.couplings.iter().map(|(&k, c)| (k, c))
    }

    /// Mean duration and error over all calibrated couplings (zero when none exist).
    pub fn mean_coupling(&self) -> CouplingCalibration {
        let n = self.couplings.len();
        if n == 0 {
            return CouplingCalibration {
                gate_time_ns: 0.0,
                gate_error: 0.0,
            };
        }
        let (t, e) = self
            .couplings
            .values()
            .fold((0.0, 0.0), |(t, e), c| (t + c.gate_time_ns, e + c.gate_error));
        CouplingCalibration {
            gate_time_ns: t / n as f64,
            gate_error: e / n as f64,
        }
    }

    /// Calibration for a gate with `control` first; falls back to the reverse direction, then the mean.
    pub fn coupling(&self, control: usize, target: usize) -> CouplingCalibration {
        self.couplings
            .get(&(control, target))
            .or_else(|| self.couplings.get(&(target, control)))
            .copied()
            .unwrap_or_else(|| self.mean_coupling())
    }

    /// Line format: `qubit,index,T1_us,T2_us,t_ns,gate_err,ro_err` and
    /// `coupling,control,target,t_ns,gate_err`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut m = NoiseModel::default();
        let mut pending = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: i + 1, msg };
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let num = |k: usize| -> Result<f64> {
                fields[k]
                    .parse()
                    .map_err(|e| err(format!("bad number `{}`: {e}", fields[k])))
            };
            let idx = |k: usize| -> Result<usize> {
                fields[k]
                    .parse()
                    .map_err(|e| err(format!("bad index `{}`: {e}", fields[k])))
            };
            match (fields[0], fields.len()) {
                ("qubit", 7) => {
                    let cal = QubitCalibration {
                        t1_us: num(2)?,
                        t2_us: num(3)?,
                        gate_time_ns: num(4)?,
                        gate_error: num(5)?,
                        readout_error: num(6)?,
                    };
                    m.insert_qubit(idx(1)?, cal).map_err(|e| err(e.to_string()))?;
                }
                ("coupling", 5) => {
                    let cal = CouplingCalibration {
                        gate_time_ns: num(3)?,
                        gate_error: num(4)?,
                    };
                    pending.push((i + 1, idx(1)?, idx(2)?, cal));
                }
                (kind, n) => return Err(err(format!("unrecognised record `{kind}` with {n} fields"))),
            }
        }
        for (line, c, t, cal) in pending {
            m.insert_coupling(c, t, cal).map_err(|e| Error::Parse {
                line,
                msg: e.to_string(),
            })?;
        }
        Ok(m)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# qubit,index,T1_us,T2_us,t_ns,gate_err,ro_err\n");
        for (q, c) in &self.qubits {
            writeln!(
                out,
                "qubit,{q},{},{},{},{},{}",
                c.t1_us, c.t2_us, c.gate_time_ns, c.gate_error, c.readout_error
            )
            .unwrap();
        }
        out.push_str("# coupling,control,target,t_ns,gate_err\n");
        for ((a, b), c) in &self.couplings {
            writeln!(out, "coupling,{a},{b},{},{}", c.gate_time_ns, c.gate_error).unwrap();
        }
        out
    }
}

/// Default logical-to-physical mapping for `n` qubits.
pub fn default_mapping(n: usize) -> Vec<usize> {
    if n == SIX_QUBIT_MAPPING.len() {
        SIX_QUBIT_MAPPING.to_vec()
    } else {
        (0..n).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_has_twelve_qubits_and_mirrored_couplings() {
        let m = NoiseModel::builtin();
        assert_eq!(m.qubits().count(), 12);
        assert_eq!(m.qubit(9), m.qubit(4));
        assert_eq!(m.coupling(8, 10), m.coupling(3, 5));
        assert_eq!(m.coupling(10, 11), m.coupling(5, 6));
        assert_eq!(m.couplings().count(), 18);
        assert_eq!(m.qubit(0).unwrap().t1_us, 9.6);
    }

    #[test]
    fn coupling_lookup_falls_back() {
        let m = NoiseModel::builtin();
        assert_eq!(m.coupling(0, 1).gate_time_ns, 391.11);
        assert_eq!(m.coupling(1, 0).gate_time_ns, 426.67);
        assert_eq!(m.coupling(2, 7), m.mean_coupling());
        let mut only_one = NoiseModel::noiseless(2);
        only_one
            .insert_coupling(
                0,
                1,
                CouplingCalibration {
                    gate_time_ns: 100.0,
                    gate_error: 0.01,
                },
            )
            .unwrap();
        assert_eq!(only_one.coupling(1, 0).gate_time_ns, 100.0);
    }

    #[test]
    fn text_round_trip() {
        let m = NoiseModel::builtin();
        assert_eq!(NoiseModel::parse(&m.to_text()).unwrap(), m);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "qubit,0,1,1,35,0.001,0.01\ncoupling,0,3,300,0.01\n";
        assert!(matches!(NoiseModel::parse(bad), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(
            NoiseModel::parse("qubit,0,1,1\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            NoiseModel::parse("# c\nqubit,0,1,1,35,1.5,0.01\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn default_mapping_uses_device_layout_for_six() {
        assert_eq!(default_mapping(6), vec![0, 1, 2, 7, 9, 10]);
        assert_eq!(default_mapping(3), vec![0, 1, 2]);
    }
}
