//! Where the kernel's array lives.
//!
//! On a multi-node Linux host the buffer is bound with `mbind` to the local
//! node or to every other node (the memory pool). On single-node hosts and
//! other platforms placement is a no-op and the buffer is ordinary memory.

use std::ops::{Deref, DerefMut};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    Local,
    #[default]
    Remote,
}

impl Placement {
    pub fn as_str(self) -> &'static str {
        match self {
            Placement::Local => "local",
            Placement::Remote => "remote",
        }
    }
}

impl FromStr for Placement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "local" => Ok(Placement::Local),
            "remote" => Ok(Placement::Remote),
            other => Err(Error::invalid(format!(
                "unknown placement {other:?}, expected local or remote"
            ))),
        }
    }
}

/// Parses a sysfs node list such as `0-1,4`.
pub fn parse_node_list(s: &str) -> Result<Vec<u32>> {
    let mut nodes = Vec::new();
    for part in s.trim().split(',').filter(|p| !p.is_empty()) {
        let bad = || Error::invalid(format!("malformed node list {s:?}"));
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (u32, u32) =
                    (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
                if b < a {
                    return Err(bad());
                }
                nodes.extend(a..=b);
            }
            None => nodes.push(part.parse().map_err(|_| bad())?),
        }
    }
    Ok(nodes)
}

/// Online NUMA nodes; `[0]` when the topology cannot be read.
pub fn online_nodes() -> Vec<u32> {
    std::fs::read_to_string("/sys/devices/system/node/online")
        .ok()
        .and_then(|s| parse_node_list(&s).ok())
        .filter(|n| !n.is_empty())
        .unwrap_or_else(|| vec![0])
}

/// Nodes a buffer with this placement should be bound to, or `None` when
/// there is nothing to choose between.
pub fn target_nodes(placement: Placement, online: &[u32], local: u32) -> Option<Vec<u32>> {
    if online.len() < 2 {
        return None;
    }
    let nodes: Vec<u32> = match placement {
        Placement::Local => vec![local],
        Placement::Remote => online.iter().copied().filter(|&n| n != local).collect(),
    };
    (!nodes.is_empty()).then_some(nodes)
}

/// Zero-initialized `f64` buffer with a placement hint.
pub struct PlacedBuffer {
    inner: imp::Buffer,
    bound: bool,
}

impl PlacedBuffer {
    pub fn new(len: usize, placement: Placement) -> Result<Self> {
        if len == 0 {
            return Err(Error::invalid("buffer must hold at least one element"));
        }
        let inner = imp::Buffer::alloc(len)?;
        let bound = imp::bind(&inner, placement);
        if !bound {
            log::debug!(
                "placement {} not applied; using default memory policy",
                placement.as_str()
            );
        }
        Ok(Self { inner, bound })
    }

    /// Whether the placement policy was actually applied.
    pub fn is_bound(&self) -> bool {
        self.bound
    }
}

impl Deref for PlacedBuffer {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        self.inner.as_slice()
    }
}

impl DerefMut for PlacedBuffer {
    fn deref_mut(&mut self) -> &mut [f64] {
        self.inner.as_mut_slice()
    }
}

#[cfg(target_os = "linux")]
mod imp {
    use super::{online_nodes, target_nodes, Placement};
    use crate::error::{Error, Result};

    const MPOL_BIND: libc::c_long = 2;

    pub struct Buffer {
        ptr: *mut f64,
        len: usize,
    }

    // the mapping is owned exclusively by this value
    unsafe impl Send for Buffer {}
    unsafe impl Sync for Buffer {}

    impl Buffer {
        pub fn alloc(len: usize) -> Result<Self> {
            let bytes = len
                .checked_mul(std::mem::size_of::<f64>())
                .ok_or_else(|| Error::invalid("buffer size overflows"))?;
            // SAFETY: anonymous private mapping, checked for failure below.
            let ptr = unsafe {
                libc::mmap(
                    std::ptr::null_mut(),
                    bytes,
                    libc::PROT_READ | libc::PROT_WRITE,
                    libc::MAP_PRIVATE | libc::MAP_ANONYMOUS,
                    -1,
                    0,
                )
            };
            if ptr == libc::MAP_FAILED {
                return Err(std::io::Error::last_os_error().into());
            }
            Ok(Self {
                ptr: ptr.cast(),
                len,
            })
        }

        fn bytes(&self) -> usize {
            self.len * std::mem::size_of::<f64>()
        }

        pub fn as_slice(&self) -> &[f64] {
            // SAFETY: the mapping is zero-filled, aligned and `len` elements long.
            unsafe { std::slice::from_raw_parts(self.ptr, self.len) }
        }

        pub fn as_mut_slice(&mut self) -> &mut [f64] {
            // SAFETY: as above, and `&mut self` guarantees exclusivity.
            unsafe { std::slice::from_raw_parts_mut(self.ptr, self.len) }
        }
    }

    impl Drop for Buffer {
        fn drop(&mut self) {
            // SAFETY: unmapping exactly the region returned by mmap.
            unsafe {
                libc::munmap(self.ptr.cast(), self.bytes());
            }
        }
    }

    fn local_node() -> u32 {
        // SAFETY: no arguments, returns -1 on failure.
        let cpu = unsafe { libc::sched_getcpu() };
        if cpu < 0 {
            return 0;
        }
        let dir = format!("/sys/devices/system/cpu/cpu{cpu}");
        std::fs::read_dir(dir)
            .ok()
            .and_then(|entries| {
                entries
                    .filter_map(|e| e.ok())
                    .find_map(|e| e.file_name().to_str()?.strip_prefix("node")?.parse().ok())
            })
            .unwrap_or(0)
    }

    /// Binds before first touch so pages fault in on the chosen nodes.
    pub fn bind(buf: &Buffer, placement: Placement) -> bool {
        let online = online_nodes();
        let Some(nodes) = target_nodes(placement, &online, local_node()) else {
            return false;
        };
        let max_node = *nodes.iter().max().unwrap_or(&0) as usize;
        let bits = 8 * std::mem::size_of::<libc::c_ulong>();
        let mut mask = vec![0 as libc::c_ulong; max_node / bits + 1];
        for &n in &nodes {
            mask[n as usize / bits] |= 1 << (n as usize % bits);
        }
        // SAFETY: the range is our own mapping and the mask outlives the call.
        let rc = unsafe {
            libc::syscall(
                libc::SYS_mbind,
                buf.ptr as *mut libc::c_void,
                buf.bytes() as libc::c_ulong,
                MPOL_BIND,
                mask.as_ptr(),
                (mask.len() * bits) as libc::c_ulong,
                0 as libc::c_uint,
            )
        };
        if rc != 0 {
            log::warn!("mbind failed: {}", std::io::Error::last_os_error());
        }
        rc == 0
    }
}

#[cfg(not(target_os = "linux"))]
mod imp {
    use super::Placement;
    use crate::error::Result;

    pub struct Buffer(Vec<f64>);

    impl Buffer {
        pub fn alloc(len: usize) -> Result<Self> {
            Ok(Self(vec![0.0; len]))
        }

        pub fn as_slice(&self) -> &[f64] {
            &self.0
        }

        pub fn as_mut_slice(&mut self) -> &mut [f64] {
            &mut self.0
        }
    }

    pub fn bind(_: &Buffer, _: Placement) -> bool {
        false
    }
}
