//! Event loop driving the kinetic structures.

use std::fmt;
use std::sync::Arc;

use crate::ann::AnnKds;
use crate::cones::{theta_for_epsilon, ConeError, ConeFamily};
use crate::eps::EpsKds;
use crate::forest::ConeForest;
use crate::kinetic::{CertTag, EventKind, EventQueue, EventStats, Owner};
use crate::motion::{MotionError, TimeInstant, Trajectory};
use crate::oracle::{check_eps, check_nn, check_semi_yao, CheckReport, Frame};
use crate::rbrt::RbrtOptions;
use crate::sygraph::{SemiYaoGraph, SemiYaoKds};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    SemiYao,
    Ann,
    EpsAnn,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::SemiYao => "semi-yao",
            Mode::Ann => "ann",
            Mode::EpsAnn => "eps-ann",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuditLevel {
    Off,
    /// Structural audits at checkpoints.
    Light,
    /// Structural audits and oracle checks whenever the state settles after
    /// an event.
    Full,
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub mode: Mode,
    pub theta: Option<f64>,
    pub eps: Option<f64>,
    pub audit: AuditLevel,
    /// Keep one record per event.
    pub record_events: bool,
}

impl SimConfig {
    pub fn new(mode: Mode) -> SimConfig {
        SimConfig {
            mode,
            theta: None,
            eps: None,
            audit: AuditLevel::Off,
            record_events: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EventRecord {
    pub t: TimeInstant,
    pub kind: EventKind,
    pub cone: Option<u32>,
    pub axis: Option<u32>,
    pub id_a: u64,
    pub id_b: Option<u64>,
    pub changes: u32,
}

impl EventRecord {
    pub const CSV_HEADER: &'static str = "t,kind,cone,axis,id_a,id_b,changes_emitted";

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{}",
            self.t,
            self.kind.name(),
            opt(self.cone.map(u64::from)),
            opt(self.axis.map(u64::from)),
            self.id_a,
            opt(self.id_b),
            self.changes
        )
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Motion(#[from] MotionError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("divergence at t={t} after {event}: {detail}")]
    Divergence { t: String, event: String, detail: String },
}

pub struct Simulation {
    points: Arc<Vec<Trajectory>>,
    family: Arc<ConeFamily>,
    config: SimConfig,
    queue: EventQueue,
    sy: Option<SemiYaoKds>,
    ann: Option<AnnKds>,
    eps_forest: Option<ConeForest>,
    eps: Option<EpsKds>,
    stats: EventStats,
    log: Vec<EventRecord>,
    last_event: Option<String>,
}

impl fmt::Debug for Simulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Simulation")
            .field("mode", &self.config.mode)
            .field("n", &self.points.len())
            .field("cones", &self.family.len())
            .field("now", self.queue.now())
            .finish()
    }
}

/// Cone angle used for a configuration.
pub fn resolve_theta(config: &SimConfig) -> Result<f64, SimError> {
    match config.mode {
        Mode::EpsAnn => {
            let eps = config
                .eps
                .ok_or_else(|| SimError::Config("eps-ann mode needs an epsilon".into()))?;
            if !(eps > 0.0) {
                return Err(SimError::Config(format!("epsilon must be positive, got {}", eps)));
            }
            theta_for_epsilon(eps)
                .ok_or_else(|| SimError::Config(format!("epsilon {} is below the smallest supported value", eps)))
        }
        _ => Ok(config.theta.unwrap_or(std::f64::consts::FRAC_PI_3)),
    }
}

impl Simulation {
    /// Builds every structure at `start`. Points are reordered by id.
    pub fn new(
        mut points: Vec<Trajectory>,
        dim: usize,
        config: SimConfig,
        start: TimeInstant,
    ) -> Result<Simulation, SimError> {
        points.sort_by_key(|p| p.point_id);
        if points.windows(2).any(|w| w[0].point_id == w[1].point_id) {
            return Err(SimError::Config("duplicate point id".into()));
        }
        if let Some(p) = points.iter().find(|p| p.dim() != dim) {
            return Err(SimError::Config(format!(
                "point {} has dimension {}",
                p.point_id,
                p.dim()
            )));
        }
        let theta = resolve_theta(&config)?;
        let for_nn = config.mode != Mode::SemiYao;
        let family = Arc::new(ConeFamily::build(dim, theta, for_nn)?);
        let points = Arc::new(points);
        let mut queue = EventQueue::new(start);
        let (mut sy, mut ann, mut eps_forest, mut eps) = (None, None, None, None);
        match config.mode {
            Mode::SemiYao | Mode::Ann => {
                let kds = SemiYaoKds::new(points.clone(), family.clone(), &mut queue)?;
                if config.mode == Mode::Ann {
                    ann = Some(AnnKds::build(points.clone(), &kds.snapshot(), &mut queue)?);
                }
                sy = Some(kds);
            }
            Mode::EpsAnn => {
                let mut forest = ConeForest::build(family.clone(), points.clone(), queue.now(), RbrtOptions::PAIRS);
                forest.start(&mut queue)?;
                eps = Some(EpsKds::build(&forest, config.eps.unwrap(), &mut queue)?);
                eps_forest = Some(forest);
            }
        }
        let mut sim = Simulation {
            points,
            family,
            config,
            queue,
            sy,
            ann,
            eps_forest,
            eps,
            stats: EventStats::default(),
            log: Vec::new(),
            last_event: None,
        };
        sim.stats.max_order_certs_per_point = sim.forest().max_cert_count() as u64;
        Ok(sim)
    }

    pub fn points(&self) -> &[Trajectory] {
        &self.points
    }

    pub fn family(&self) -> &ConeFamily {
        &self.family
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn now(&self) -> &TimeInstant {
        self.queue.now()
    }

    pub fn queue(&self) -> &EventQueue {
        &self.queue
    }

    pub fn stats(&self) -> &EventStats {
        &self.stats
    }

    pub fn events(&self) -> &[EventRecord] {
        &self.log
    }

    pub fn forest(&self) -> &ConeForest {
        match (&self.sy, &self.eps_forest) {
            (Some(s), _) => s.forest(),
            (None, Some(f)) => f,
            _ => unreachable!("a simulation always owns one forest"),
        }
    }

    pub fn semi_yao(&self) -> Option<SemiYaoGraph> {
        self.sy.as_ref().map(SemiYaoKds::snapshot)
    }

    pub fn ann(&self) -> Option<&AnnKds> {
        self.ann.as_ref()
    }

    pub fn eps(&self) -> Option<&EpsKds> {
        self.eps.as_ref()
    }

    fn visits(&self) -> u64 {
        let trees: u64 = self.forest().trees().iter().map(|t| t.visits()).sum();
        trees + self.ann.as_ref().map_or(0, AnnKds::visits) + self.eps.as_ref().map_or(0, EpsKds::visits)
    }

    /// Processes the next event if it happens no later than `limit`.
    pub fn step(&mut self, limit: &TimeInstant) -> Result<bool, SimError> {
        let Some((t, _, cert)) = self.queue.pop_until(limit) else {
            return Ok(false);
        };
        let before = self.visits();
        let record = match cert.tag {
            CertTag::Order { cone, list, pos } => {
                let (l, j, pos) = (cone as usize, list as usize, pos as usize);
                let (ev, changes) = if let Some(sy) = self.sy.as_mut() {
                    let (ev, edges) = sy.handle(l, j, pos, &mut self.queue)?;
                    self.stats.edge_changes += edges.len() as u64;
                    let mut changes = edges.len() as u32;
                    if let Some(ann) = self.ann.as_mut() {
                        for e in &edges {
                            let moved = ann.on_edge_change(e, &mut self.queue)?;
                            self.stats.nn_changes += moved.len() as u64;
                            changes += moved.len() as u32;
                        }
                    }
                    (ev, changes)
                } else {
                    let forest = self.eps_forest.as_mut().unwrap();
                    let ev = forest.handle(l, j, pos, &mut self.queue)?;
                    let moved = self.eps.as_mut().unwrap().apply(forest, &ev, &mut self.queue)?;
                    self.stats.eps_changes += moved.len() as u64;
                    let changes = (ev.report.pairs.len() + moved.len()) as u32;
                    (ev, changes)
                };
                match ev.kind {
                    EventKind::OrderU => self.stats.u_swaps += 1,
                    _ => self.stats.x_swaps += 1,
                }
                self.stats.max_order_certs_per_point = self
                    .stats
                    .max_order_certs_per_point
                    .max(self.forest().max_cert_count() as u64);
                EventRecord {
                    t: t.clone(),
                    kind: ev.kind,
                    cone: Some(cone),
                    axis: Some(list),
                    id_a: self.points[ev.a as usize].point_id,
                    id_b: Some(self.points[ev.b as usize].point_id),
                    changes,
                }
            }
            CertTag::Tournament { owner, point, node } => {
                let (moved, winner) = match owner {
                    Owner::Nearest => {
                        let ann = self.ann.as_mut().expect("nearest-neighbour tournaments");
                        let moved = ann.handle_event(point, node, &mut self.queue)?;
                        self.stats.nn_tournament_events += 1;
                        self.stats.nn_changes += moved as u64;
                        (moved, ann.nearest(point))
                    }
                    Owner::Approximate => {
                        let eps = self.eps.as_mut().expect("approximate tournaments");
                        let moved = eps.handle_event(point, node, &mut self.queue)?;
                        self.stats.eps_tournament_events += 1;
                        self.stats.eps_changes += moved as u64;
                        (moved, eps.eps_nearest(point))
                    }
                };
                EventRecord {
                    t: t.clone(),
                    kind: EventKind::Tournament,
                    cone: None,
                    axis: None,
                    id_a: self.points[point as usize].point_id,
                    id_b: winner.map(|w| self.points[w as usize].point_id),
                    changes: moved as u32,
                }
            }
        };
        let spent = self.visits() - before;
        self.stats.node_visits += spent;
        self.stats.max_event_visits = self.stats.max_event_visits.max(spent);
        self.last_event = Some(format!(
            "{} event (cone {:?}, axis {:?}, ids {} / {:?})",
            record.kind.name(),
            record.cone,
            record.axis,
            record.id_a,
            record.id_b
        ));
        if self.config.record_events {
            self.log.push(record);
        }
        if self.config.audit == AuditLevel::Full && self.settled() {
            let rep = self.verify_now();
            if !rep.ok() {
                return Err(self.divergence(rep));
            }
        }
        Ok(true)
    }

    /// No further event is due at the current instant.
    pub fn settled(&self) -> bool {
        self.queue.peek_time().is_none_or(|t| t > self.queue.now())
    }

    fn divergence(&self, rep: CheckReport) -> SimError {
        SimError::Divergence {
            t: format!("{:?}", self.now()),
            event: self.last_event.clone().unwrap_or_else(|| "initial build".into()),
            detail: rep.first_failure.unwrap_or_default(),
        }
    }

    /// Structural audit of every structure against a rebuild at `now`.
    pub fn audit(&self) -> Result<(), String> {
        let t = self.now();
        self.forest().audit(t)?;
        if let (Some(ann), Some(sy)) = (&self.ann, &self.sy) {
            ann.audit(&sy.snapshot(), t)?;
        }
        if let (Some(eps), Some(f)) = (&self.eps, &self.eps_forest) {
            eps.audit(f, t)?;
        }
        Ok(())
    }

    /// Structural audit plus comparison of all outputs with the oracle.
    pub fn verify_now(&self) -> CheckReport {
        let mut rep = self.check_outputs();
        if let Err(e) = self.audit() {
            rep.audit_failures += 1;
            rep.fail(format!("t={}: audit: {}", self.now(), e));
        }
        rep
    }

    /// Compares the outputs alone with the oracle.
    pub fn check_outputs(&self) -> CheckReport {
        let frame = Frame::new(&self.points, self.now());
        let mut rep = CheckReport::default();
        if let Some(g) = self.semi_yao() {
            rep.merge(check_semi_yao(&frame, &self.family, &g));
        }
        if let Some(ann) = &self.ann {
            rep.merge(check_nn(&frame, &ann.all_nearest()));
        }
        if let Some(eps) = &self.eps {
            rep.merge(check_eps(&frame, &eps.all_eps_nearest(), eps.epsilon()));
        }
        rep
    }

    /// Processes all events up to `until`, calling `on_checkpoint` at each
    /// checkpoint once every event at or before it has been handled.
    pub fn run_until<F>(
        &mut self,
        until: &TimeInstant,
        checkpoints: &[TimeInstant],
        mut on_checkpoint: F,
    ) -> Result<(), SimError>
    where
        F: FnMut(&Simulation) -> Result<(), SimError>,
    {
        for c in checkpoints {
            if c > until || c < self.now() {
                continue;
            }
            while self.step(c)? {}
            self.queue.advance_clock(c.clone());
            if self.config.audit != AuditLevel::Off {
                if let Err(e) = self.audit() {
                    let mut rep = CheckReport::default();
                    rep.fail(e);
                    return Err(self.divergence(rep));
                }
            }
            on_checkpoint(self)?;
        }
        while self.step(until)? {}
        if until > self.now() {
            self.queue.advance_clock(until.clone());
        }
        Ok(())
    }

    /// Corrupts one aggregate of the first tree; returns false when no tree
    /// has a node with two or more points.
    #[doc(hidden)]
    pub fn inject_fault(&mut self) -> bool {
        let forest = match (&mut self.sy, &mut self.eps_forest) {
            (Some(s), _) => s.forest_mut(),
            (None, Some(f)) => f,
            _ => return false,
        };
        (0..forest.trees().len()).any(|l| forest.tree_mut(l).corrupt_aggregate())
    }

    /// One summary row: header and values.
    pub fn summary_csv(&self) -> (String, String) {
        let s = &self.stats;
        let header = "mode,n,dim,cones,t_end,events,u_swaps,x_swaps,nn_tournament_events,eps_tournament_events,edge_changes,nn_changes,eps_changes,max_order_certs_per_point,node_visits,max_event_visits";
        let row = format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.config.mode.name(),
            self.points.len(),
            self.family.dim(),
            self.family.len(),
            self.now(),
            s.total_events(),
            s.u_swaps,
            s.x_swaps,
            s.nn_tournament_events,
            s.eps_tournament_events,
            s.edge_changes,
            s.nn_changes,
            s.eps_changes,
            s.max_order_certs_per_point,
            s.node_visits,
            s.max_event_visits
        );
        (header.to_string(), row)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motion::Polynomial;

    fn lin(id: u64, x: [i64; 2], y: [i64; 2]) -> Trajectory {
        Trajectory::new(id, vec![Polynomial::from_i64(&x), Polynomial::from_i64(&y)])
    }

    #[test]
    fn static_points_have_no_events() {
        let pts = vec![lin(0, [0, 0], [0, 0]), lin(1, [3, 0], [1, 0]), lin(2, [1, 0], [5, 0])];
        for mode in [Mode::SemiYao, Mode::Ann] {
            let mut sim = Simulation::new(pts.clone(), 2, SimConfig::new(mode), TimeInstant::zero()).unwrap();
            sim.run_until(&TimeInstant::from_i64(100), &[], |_| Ok(())).unwrap();
            assert_eq!(sim.stats().total_events(), 0);
        }
    }

    #[test]
    fn crossing_points_swap_once_per_list() {
        // x = t and x = 1 - t cross at t = 1/2 on the horizontal line.
        let pts = vec![lin(0, [0, 1], [0, 0]), lin(1, [1, -1], [0, 0])];
        let mut cfg = SimConfig::new(Mode::Ann);
        cfg.record_events = true;
        cfg.audit = AuditLevel::Full;
        let mut sim = Simulation::new(pts, 2, cfg, TimeInstant::zero()).unwrap();
        let mut seen = 0;
        sim.run_until(
            &TimeInstant::from_i64(1),
            &[TimeInstant::Exact(crate::motion::rat(1, 4))],
            |s| {
                seen += 1;
                assert!(s.verify_now().ok());
                Ok(())
            },
        )
        .unwrap();
        assert_eq!(seen, 1);
        assert!(sim.stats().swap_events() > 0);
        for e in sim.events() {
            assert_eq!(e.t, TimeInstant::Exact(crate::motion::rat(1, 2)));
        }
        assert_eq!(sim.ann().unwrap().nearest(0), Some(1));
        assert!(sim.verify_now().ok());
    }
}
