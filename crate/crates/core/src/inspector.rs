//! Exhaustive inspection of every property on every element.
//!
//! The id space is cut into contiguous batches ([`plan_batches`]). Batches are
//! scanned either on the calling thread or by a pool of scoped workers that
//! pull batch indices from a shared counter. Each worker counts into its own
//! private tally; the tallies are merged once, on the calling thread, after
//! every worker has finished. Because counting is a pointwise sum, the result
//! does not depend on how batches were assigned.

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use crate::graph::{ElementKind, Graph, Property, Symbol, ValueType};
use crate::report::{merge_partials, TypeReport, NO_LABEL};

pub const DEFAULT_CONCURRENCY: usize = 50;
pub const MAX_AUTO_BATCH: usize = 100_000;
const BATCHES_PER_WORKER: usize = 10;

/// Scan parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InspectConfig {
    /// Scan batches on worker threads instead of the calling thread.
    pub parallel: bool,
    /// Worker count when `parallel` is set; ignored otherwise.
    pub concurrency: usize,
    /// Inspect only the first `limit` elements by id. 0 inspects everything.
    pub limit: usize,
    /// Elements per batch. 0 picks a size automatically.
    pub batch_size: usize,
    /// Emit one progress line per completed batch.
    pub debug: bool,
}

impl Default for InspectConfig {
    fn default() -> Self {
        InspectConfig {
            parallel: false,
            concurrency: DEFAULT_CONCURRENCY,
            limit: 0,
            batch_size: 0,
            debug: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("concurrency must be at least 1")]
pub struct InvalidConfig;

impl InspectConfig {
    pub fn serial() -> Self {
        Self::default()
    }

    pub fn parallel(concurrency: usize) -> Self {
        InspectConfig {
            parallel: true,
            concurrency,
            ..Self::default()
        }
    }

    pub fn with_limit(mut self, limit: usize) -> Self {
        self.limit = limit;
        self
    }

    pub fn with_batch_size(mut self, batch_size: usize) -> Self {
        self.batch_size = batch_size;
        self
    }

    pub fn with_debug(mut self, debug: bool) -> Self {
        self.debug = debug;
        self
    }

    pub fn validate(&self) -> Result<(), InvalidConfig> {
        if self.concurrency == 0 {
            return Err(InvalidConfig);
        }
        Ok(())
    }

    /// Configured worker count: `concurrency` when parallel, else 1.
    /// A zero concurrency is treated as 1.
    pub fn workers(&self) -> usize {
        if self.parallel {
            self.concurrency.max(1)
        } else {
            1
        }
    }

    /// Number of elements a scan over `total` elements will inspect.
    pub fn inspected(&self, total: usize) -> usize {
        if self.limit == 0 {
            total
        } else {
            self.limit.min(total)
        }
    }
}

/// Ordered, disjoint, contiguous batches covering `0..inspected`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchPlan {
    batches: Vec<Range<usize>>,
    batch_size: usize,
}

impl BatchPlan {
    pub fn batches(&self) -> &[Range<usize>] {
        &self.batches
    }

    pub fn len(&self) -> usize {
        self.batches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.batches.is_empty()
    }

    /// Effective batch size the plan was cut with.
    pub fn batch_size(&self) -> usize {
        self.batch_size
    }

    pub fn inspected(&self) -> usize {
        self.batches.last().map_or(0, |b| b.end)
    }
}

/// Auto size: `clamp(ceil(inspected / (workers * 10)), 1, 100000)`.
pub fn auto_batch_size(inspected: usize, workers: usize) -> usize {
    inspected
        .div_ceil(workers.max(1) * BATCHES_PER_WORKER)
        .clamp(1, MAX_AUTO_BATCH)
}

pub fn plan_batches(total: usize, config: &InspectConfig) -> BatchPlan {
    let inspected = config.inspected(total);
    let batch_size = if config.batch_size > 0 {
        config.batch_size
    } else {
        auto_batch_size(inspected, config.workers())
    };
    let batches = (0..inspected)
        .step_by(batch_size)
        .map(|lo| lo..(lo + batch_size).min(inspected))
        .collect();
    BatchPlan {
        batches,
        batch_size,
    }
}

/// One completed batch, formatted as the debug progress line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchProgress {
    pub kind: ElementKind,
    /// 1-based position of the batch in the plan.
    pub batch: usize,
    pub batches: usize,
    pub span: Range<usize>,
    /// Milliseconds since the inspection started.
    pub elapsed_ms: u128,
}

impl fmt::Display for BatchProgress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "inspect kind={} batch={}/{} span={}..{} elements={} elapsed_ms={}",
            self.kind,
            self.batch,
            self.batches,
            self.span.start,
            self.span.end,
            self.span.len(),
            self.elapsed_ms
        )
    }
}

/// Receives progress when `debug` is enabled. Called from worker threads.
pub trait ProgressSink: Sync {
    fn batch_done(&self, progress: &BatchProgress);
}

impl<F: Fn(&BatchProgress) + Sync> ProgressSink for F {
    fn batch_done(&self, progress: &BatchProgress) {
        self(progress)
    }
}

/// Writes progress lines to standard error.
#[derive(Debug, Clone, Copy, Default)]
pub struct StderrProgress;

impl ProgressSink for StderrProgress {
    fn batch_done(&self, progress: &BatchProgress) {
        eprintln!("{progress}");
    }
}

pub fn inspect_nodes(graph: &Graph, config: &InspectConfig) -> TypeReport {
    inspect(graph, ElementKind::Nodes, config, &StderrProgress)
}

pub fn inspect_relationships(graph: &Graph, config: &InspectConfig) -> TypeReport {
    inspect(graph, ElementKind::Relationships, config, &StderrProgress)
}

/// Inspects nodes or relationships, reporting progress to `sink` when
/// `config.debug` is set.
pub fn inspect(
    graph: &Graph,
    kind: ElementKind,
    config: &InspectConfig,
    sink: &dyn ProgressSink,
) -> TypeReport {
    let total = match kind {
        ElementKind::Nodes => graph.node_count(),
        ElementKind::Relationships => graph.relationship_count(),
    };
    let plan = plan_batches(total, config);
    if plan.is_empty() {
        return TypeReport::new();
    }

    let started = Instant::now();
    let report_batch = |index: usize| {
        if config.debug {
            sink.batch_done(&BatchProgress {
                kind,
                batch: index + 1,
                batches: plan.len(),
                span: plan.batches[index].clone(),
                elapsed_ms: started.elapsed().as_millis(),
            });
        }
    };

    let tallies: Vec<Tally> = if config.parallel {
        let workers = config.workers().min(plan.len());
        let next = AtomicUsize::new(0);
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|_| {
                    scope.spawn(|| {
                        let mut tally = Tally::default();
                        loop {
                            let index = next.fetch_add(1, Ordering::Relaxed);
                            let Some(span) = plan.batches.get(index) else {
                                break;
                            };
                            tally.scan(graph, kind, span.clone());
                            report_batch(index);
                        }
                        tally
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("inspection worker panicked"))
                .collect()
        })
    } else {
        let mut tally = Tally::default();
        for (index, span) in plan.batches.iter().enumerate() {
            tally.scan(graph, kind, span.clone());
            report_batch(index);
        }
        vec![tally]
    };

    merge_partials(tallies.into_iter().map(|t| t.into_report(graph)))
}

const UNLABELED: u32 = u32::MAX;

/// Worker-private counts keyed by interned `(group, property)`.
#[derive(Default)]
struct Tally {
    counts: HashMap<u64, [u64; ValueType::COUNT]>,
}

impl Tally {
    #[inline]
    fn bump(&mut self, group: u32, props: &[Property]) {
        for p in props {
            let key = (u64::from(group) << 32) | p.key.index() as u64;
            self.counts.entry(key).or_insert([0; ValueType::COUNT])
                [p.value.value_type().index()] += 1;
        }
    }

    fn scan(&mut self, graph: &Graph, kind: ElementKind, span: Range<usize>) {
        match kind {
            ElementKind::Nodes => {
                for node in graph.scan_nodes(span).expect("plan lies within the graph") {
                    let props = node.raw_properties();
                    if props.is_empty() {
                        continue;
                    }
                    let labels = node.label_symbols();
                    if labels.is_empty() {
                        self.bump(UNLABELED, props);
                    } else {
                        for label in labels {
                            self.bump(label.index() as u32, props);
                        }
                    }
                }
            }
            ElementKind::Relationships => {
                for rel in graph
                    .scan_relationships(span)
                    .expect("plan lies within the graph")
                {
                    self.bump(rel.type_symbol().index() as u32, rel.raw_properties());
                }
            }
        }
    }

    fn into_report(self, graph: &Graph) -> TypeReport {
        let mut report = TypeReport::new();
        for (key, counts) in self.counts {
            let group = (key >> 32) as u32;
            let group = if group == UNLABELED {
                NO_LABEL
            } else {
                graph.resolve(Symbol::new(group))
            };
            let property = graph.resolve(Symbol::new(key as u32));
            for (t, &c) in ValueType::ALL.iter().zip(counts.iter()) {
                report.add(group, property, *t, c);
            }
        }
        report
    }
}
