use std::sync::OnceLock;

/// Size caps for the exhaustive scans and enumerations.
///
/// All bounds are on the number of points n. The defaults keep every
/// worst-case scan at desk scale; each can be overridden through the
/// `MEDIAN_BV_SIZE_CAPS` environment variable, a comma list of `key=value`
/// entries with keys `axiom`, `enum`, `linear`, `topology`, `fragment`,
/// `convex`. Example: `MEDIAN_BV_SIZE_CAPS=axiom=32,topology=10`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeCaps {
    /// Axiom scans, the worst being the n^5 associative-law sweep.
    pub axiom_scan: usize,
    /// Subalgebra enumeration (2^n subsets, each closure-checked).
    pub subalgebra_enum: usize,
    /// Linear-subset enumeration for structures with no faster route.
    pub linear_enum: usize,
    /// Topology generation from a shadow subbase.
    pub topology: usize,
    /// Fragmentation scans over all nonempty subsets.
    pub fragment: usize,
    /// Convex-subset enumeration.
    pub convex_enum: usize,
}

pub const DEFAULT_CAPS: SizeCaps = SizeCaps {
    axiom_scan: 64,
    subalgebra_enum: 12,
    linear_enum: 12,
    topology: 12,
    fragment: 15,
    convex_enum: 16,
};

impl Default for SizeCaps {
    fn default() -> Self {
        DEFAULT_CAPS
    }
}

impl SizeCaps {
    /// Parses an override list such as `axiom=32,enum=10`. Unknown keys and
    /// unparsable values are ignored so a stray variable never breaks runs.
    pub fn with_overrides(mut self, spec: &str) -> Self {
        for item in spec.split(',') {
            let Some((key, value)) = item.split_once('=') else { continue };
            let Ok(value) = value.trim().parse::<usize>() else { continue };
            match key.trim() {
                "axiom" => self.axiom_scan = value,
                "enum" => self.subalgebra_enum = value,
                "linear" => self.linear_enum = value,
                "topology" => self.topology = value,
                "fragment" => self.fragment = value,
                "convex" => self.convex_enum = value,
                _ => {}
            }
        }
        self
    }
}

/// Process-wide caps: defaults plus the environment override, read once.
pub fn caps() -> SizeCaps {
    static CAPS: OnceLock<SizeCaps> = OnceLock::new();
    *CAPS.get_or_init(|| match std::env::var("MEDIAN_BV_SIZE_CAPS") {
        Ok(spec) => DEFAULT_CAPS.with_overrides(&spec),
        Err(_) => DEFAULT_CAPS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_parse_and_ignore_junk() {
        let caps = DEFAULT_CAPS.with_overrides("axiom=32, topology=9,bogus=3,enum=oops");
        assert_eq!(caps.axiom_scan, 32);
        assert_eq!(caps.topology, 9);
        assert_eq!(caps.subalgebra_enum, DEFAULT_CAPS.subalgebra_enum);
        assert_eq!(caps.fragment, DEFAULT_CAPS.fragment);
    }
}
