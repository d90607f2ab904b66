use std::time::{Duration, Instant};

use crate::error::{Error, Result};

pub const INITIAL_ALPHA: f64 = 0.5;
pub const INITIAL_BETA: f64 = 0.8;
/// Per-trial multiplier applied to alpha.
pub const ALPHA_DECAY: f64 = 1.0 - 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct KernelConfig {
    /// Flops per element.
    pub nflop: u32,
    pub threads: u32,
    /// Array length in doubles.
    pub array_elems: usize,
    pub trials: u32,
    pub alpha_decay: f64,
}

impl KernelConfig {
    pub fn new(nflop: u32, threads: u32, array_elems: usize, trials: u32) -> Result<Self> {
        let cfg = Self {
            nflop,
            threads,
            array_elems,
            trials,
            alpha_decay: ALPHA_DECAY,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nflop < 1 {
            return Err(Error::field("nflop", "must be at least 1"));
        }
        if self.threads < 1 {
            return Err(Error::field("threads", "must be at least 1"));
        }
        if self.array_elems < 1 {
            return Err(Error::field("array_elems", "must be at least 1"));
        }
        if self.trials < 1 {
            return Err(Error::field("trials", "must be at least 1"));
        }
        if !self.alpha_decay.is_finite() {
            return Err(Error::field("alpha_decay", "must be finite"));
        }
        Ok(())
    }

    pub fn array_bytes(&self) -> usize {
        self.array_elems * std::mem::size_of::<f64>()
    }

    /// Default array length: four times the last-level cache, so the sweep
    /// always streams from memory.
    pub fn default_elems() -> usize {
        4 * last_level_cache_bytes() / std::mem::size_of::<f64>()
    }
}

fn last_level_cache_bytes() -> usize {
    const FALLBACK: usize = 64 << 20;
    let mut best = None;
    for idx in 0..8 {
        let base = format!("/sys/devices/system/cpu/cpu0/cache/index{idx}");
        let Ok(size) = std::fs::read_to_string(format!("{base}/size")) else {
            break;
        };
        let size = size.trim();
        let bytes = if let Some(k) = size.strip_suffix('K') {
            k.parse::<usize>().ok().map(|v| v << 10)
        } else if let Some(m) = size.strip_suffix('M') {
            m.parse::<usize>().ok().map(|v| v << 20)
        } else {
            size.parse::<usize>().ok()
        };
        best = best.max(bytes);
    }
    best.unwrap_or(FALLBACK)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelRun {
    pub elapsed: Duration,
    /// Alpha after the last decay; seeds a continuation run.
    pub final_alpha: f64,
}

#[inline(always)]
fn element<const NFLOP: u32>(a: f64, alpha: f64) -> f64 {
    element_dyn(a, alpha, NFLOP)
}

#[inline(always)]
fn element_dyn(a: f64, alpha: f64, nflop: u32) -> f64 {
    let mut beta = INITIAL_BETA;
    if nflop % 2 == 1 {
        beta = a + alpha;
    }
    for _ in 0..nflop / 2 {
        // separate multiply and add: no fused rounding
        beta = beta * a + alpha;
    }
    beta
}

fn sweep<const NFLOP: u32>(chunk: &mut [f64], alpha: f64) {
    for x in chunk.iter_mut() {
        *x = element::<NFLOP>(*x, alpha);
    }
}

fn sweep_dyn(chunk: &mut [f64], alpha: f64, nflop: u32) {
    for x in chunk.iter_mut() {
        *x = element_dyn(*x, alpha, nflop);
    }
}

fn sweep_any(chunk: &mut [f64], alpha: f64, nflop: u32) {
    match nflop {
        1 => sweep::<1>(chunk, alpha),
        2 => sweep::<2>(chunk, alpha),
        3 => sweep::<3>(chunk, alpha),
        4 => sweep::<4>(chunk, alpha),
        5 => sweep::<5>(chunk, alpha),
        6 => sweep::<6>(chunk, alpha),
        7 => sweep::<7>(chunk, alpha),
        8 => sweep::<8>(chunk, alpha),
        16 => sweep::<16>(chunk, alpha),
        32 => sweep::<32>(chunk, alpha),
        n => sweep_dyn(chunk, alpha, n),
    }
}

/// Splits `array` into `parts` contiguous chunks whose lengths differ by at
/// most one; trailing chunks may be empty.
fn balanced_chunks(array: &mut [f64], parts: usize) -> Vec<&mut [f64]> {
    let base = array.len() / parts;
    let extra = array.len() % parts;
    let mut rest = array;
    let mut out = Vec::with_capacity(parts);
    for i in 0..parts {
        let len = base + usize::from(i < extra);
        let (head, tail) = rest.split_at_mut(len);
        out.push(head);
        rest = tail;
    }
    out
}

/// Runs the kernel with the initial alpha.
pub fn run_kernel(cfg: &KernelConfig, array: &mut [f64]) -> Result<KernelRun> {
    run_kernel_from(cfg, array, INITIAL_ALPHA)
}

/// Runs `cfg.trials` sweeps starting from `alpha`, with exactly
/// `cfg.threads` workers over disjoint chunks.
pub fn run_kernel_from(cfg: &KernelConfig, array: &mut [f64], alpha: f64) -> Result<KernelRun> {
    cfg.validate()?;
    if array.len() != cfg.array_elems {
        return Err(Error::invalid(format!(
            "buffer holds {} elements, config expects {}",
            array.len(),
            cfg.array_elems
        )));
    }
    let mut final_alpha = alpha;
    for _ in 0..cfg.trials {
        final_alpha *= cfg.alpha_decay;
    }

    let chunks = balanced_chunks(array, cfg.threads as usize);
    let start = Instant::now();
    std::thread::scope(|scope| {
        for chunk in chunks {
            scope.spawn(move || {
                let mut alpha = alpha;
                for _ in 0..cfg.trials {
                    sweep_any(chunk, alpha, cfg.nflop);
                    alpha *= cfg.alpha_decay;
                }
            });
        }
    });
    Ok(KernelRun {
        elapsed: start.elapsed(),
        final_alpha,
    })
}
