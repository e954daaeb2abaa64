use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::config::*;
use super::{stage_seed, tag_seed, Artifact, Kind};
use crate::cascade::simulate_sir;
use crate::error::{Error, Result};
use crate::events::synth::identity_dictionary;
use crate::events::{
    all_timelines, born_tags, hashtag_network, load_events_with, popularity_histogram,
    ActivityIndex, EventStream, FieldSummary, TagId, TimeWindow, SECONDS_PER_DAY,
};
use crate::graph::io::{read_edge_list, IdDictionary};
use crate::graph::{
    connected_components, degree_histogram, generate_ba, generate_er, ComponentReport,
    DegreeDistribution, DegreeKind, Directedness, Graph,
};
use crate::leadtime::{
    draw_samples, global_time_pool, lead_time_experiment, multi_sample_lead_times, realtime_detect,
    replicate_seed, shuffle_null_for_tag, size_sweep, AdoptionTimes, DetectionConfig,
    DetectionReport, LeadTimeSummary, NullSummary, SampleSize, SamplingSpec, SweepRow, TagSource,
    TimedItem, Universe,
};
use crate::paradox::{friend_degree_dist, paradox_stats, sampled_friend_dist};
use crate::rng;
use crate::samplestats::{detection_curve, write_curve_csv};
use crate::sampling::{sample_control, sample_sensors};
use crate::stats;

pub(super) fn run_kind(kind: Kind, cfg: &ExperimentConfig) -> Result<Vec<Artifact>> {
    let seed = cfg.seed.expect("validated");
    match kind {
        Kind::Fig1 => fig1(cfg, seed),
        Kind::Fig2a => fig2a(cfg, seed),
        Kind::Fig2bc => fig2bc(cfg, seed),
        Kind::Fig3 => fig3(cfg, seed),
        Kind::Fig4 => fig4(cfg, seed),
        Kind::Samplemath => samplemath(cfg),
    }
}

fn load_graph(src: &GraphSource, seed: u64) -> Result<(Graph, IdDictionary)> {
    let gen_seed = stage_seed(seed, "graph");
    match src {
        GraphSource::File {
            path,
            directed,
            dictionary,
        } => {
            let mut dict = match dictionary {
                Some(d) => IdDictionary::load(d)?,
                None => IdDictionary::new(),
            };
            let dir = if *directed {
                Directedness::Directed
            } else {
                Directedness::Undirected
            };
            let (g, _) = read_edge_list(path, &mut dict, dir)?;
            Ok((g, dict))
        }
        GraphSource::Ba { n, m } => Ok((generate_ba(*n, *m, gen_seed)?, identity_dictionary(*n))),
        GraphSource::Er { n, p, directed } => {
            let dir = if *directed {
                Directedness::Directed
            } else {
                Directedness::Undirected
            };
            Ok((generate_er(*n, *p, dir, gen_seed)?, identity_dictionary(*n)))
        }
    }
}

fn load_stream(cfg: &ExperimentConfig, dict: IdDictionary) -> Result<EventStream> {
    let ev = cfg.events.as_ref().expect("validated");
    let window = ev.window.map(|(a, b)| TimeWindow::new(a, b)).transpose()?;
    let mut stream = load_events_with(&ev.path, window, dict)?;
    if let Some(m) = &ev.messages {
        stream.attach_messages(m)?;
    }
    Ok(stream)
}

fn dist_csv(d: &DegreeDistribution) -> String {
    let mut buf = Vec::new();
    d.write_csv(&mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii")
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn opt_usize(x: Option<usize>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// File-name-safe form of a tag.
fn file_stem(index: usize, tag: &str) -> String {
    let clean: String = tag
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .take(48)
        .collect();
    format!("{index:03}_{clean}")
}

fn sampling_spec(s: &SamplingSection, size: SampleSize) -> SamplingSpec {
    SamplingSpec {
        size,
        policy: s.policy,
        direction: s.direction,
        remove_overlap: s.remove_overlap,
        control_filter: None,
    }
}

fn active_filter(stream: &EventStream, graph: &Graph) -> Arc<Vec<u32>> {
    Arc::new(
        stream
            .active_users()
            .into_iter()
            .filter(|&u| (u as usize) < graph.node_count())
            .collect(),
    )
}

// ---------------------------------------------------------------- fig1

#[derive(Serialize)]
struct Fig1Replicate {
    index: usize,
    control_size: usize,
    sensor_size: usize,
    control_mean_degree: f64,
    sensor_mean_degree: f64,
    ks_control: f64,
    ks_sensor: f64,
}

fn fig1(cfg: &ExperimentConfig, seed: u64) -> Result<Vec<Artifact>> {
    let p = cfg.paradox.as_ref().expect("validated");
    let (graph, _) = load_graph(cfg.graph.as_ref().expect("validated"), seed)?;
    let kind = p.degree;
    let dist = degree_histogram(&graph, kind);
    let paradox = paradox_stats(&dist)?;
    let friend = friend_degree_dist(&dist)?;
    let sensor_dedup = sampled_friend_dist(&dist, p.gamma, true)?;
    let sensor_multi = sampled_friend_dist(&dist, p.gamma, false)?;
    let control_size = ((p.gamma * graph.node_count() as f64).round() as usize).max(1);
    let sample_seed = stage_seed(seed, "samples");

    let draws = (0..p.replicates)
        .into_par_iter()
        .map(|r| {
            let s = replicate_seed(sample_seed, r);
            let control = sample_control(&graph, control_size, s)?;
            let sensor = sample_sensors(
                &graph,
                &control,
                p.policy,
                p.direction,
                control.len(),
                rng::derive(s, &[1]),
            )?;
            let degrees = |members: &[u32]| -> Vec<u64> {
                members
                    .iter()
                    .map(|&v| graph.degree(v, kind) as u64)
                    .collect()
            };
            Ok((degrees(&control.members), degrees(&sensor.members)))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut replicates = Vec::with_capacity(draws.len());
    for (r, (c, s)) in draws.iter().enumerate() {
        let cd = DegreeDistribution::from_degrees(c.iter().copied())?;
        let sd = DegreeDistribution::from_degrees(s.iter().copied())?;
        replicates.push(Fig1Replicate {
            index: r,
            control_size: c.len(),
            sensor_size: s.len(),
            control_mean_degree: cd.mean(),
            sensor_mean_degree: sd.mean(),
            ks_control: cd.ks_distance(&dist),
            ks_sensor: sd.ks_distance(&sensor_dedup),
        });
    }
    let pooled_control =
        DegreeDistribution::from_degrees(draws.iter().flat_map(|d| d.0.iter().copied()))?;
    let pooled_sensor =
        DegreeDistribution::from_degrees(draws.iter().flat_map(|d| d.1.iter().copied()))?;
    let ks_c: Vec<f64> = replicates.iter().map(|r| r.ks_control).collect();
    let ks_s: Vec<f64> = replicates.iter().map(|r| r.ks_sensor).collect();

    let summary = json!({
        "node_count": graph.node_count(),
        "edge_count": graph.edge_count(),
        "directed": graph.is_directed(),
        "degree": kind,
        // The closed forms assume every friendship is reciprocal.
        "directed_degree_approximation": graph.is_directed() && kind != DegreeKind::Total,
        "gamma": p.gamma,
        "policy": p.policy,
        "control_size": control_size,
        "replicates": p.replicates,
        "paradox": paradox,
        "identity_residual": paradox.identity_residual(),
        "mean_degree": {
            "population": dist.mean(),
            "friend_analytic": friend.mean(),
            "sensor_analytic": sensor_dedup.mean(),
            "sensor_analytic_with_multiplicity": sensor_multi.mean(),
            "control_empirical": pooled_control.mean(),
            "sensor_empirical": pooled_sensor.mean(),
        },
        "ks": {
            "control_mean": stats::mean(&ks_c),
            "control_pooled": pooled_control.ks_distance(&dist),
            "sensor_mean": stats::mean(&ks_s),
            "sensor_pooled": pooled_sensor.ks_distance(&sensor_dedup),
        },
        "total_variation": {
            "control_pooled": pooled_control.total_variation(&dist),
            "sensor_pooled": pooled_sensor.total_variation(&sensor_dedup),
        },
        "per_replicate": replicates,
    });
    Ok(vec![
        Artifact::text("degree_distribution.csv", dist_csv(&dist)),
        Artifact::text("friend_distribution.csv", dist_csv(&friend)),
        Artifact::text("sensor_analytic.csv", dist_csv(&sensor_dedup)),
        Artifact::text("sensor_analytic_multiplicity.csv", dist_csv(&sensor_multi)),
        Artifact::text("control_empirical.csv", dist_csv(&pooled_control)),
        Artifact::text("sensor_empirical.csv", dist_csv(&pooled_sensor)),
        Artifact::json("fig1.json", &summary)?,
    ])
}

// ---------------------------------------------------------------- fig2a

fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("size,mean_delta_t,sem,fraction_negative,replicates,skipped\n");
    for r in rows {
        match &r.summary {
            Some(x) => writeln!(
                s,
                "{},{},{},{},{},{}",
                r.size, x.mean, x.sem, x.fraction_negative, x.replicates, x.skipped
            ),
            None => writeln!(s, "{},,,,0,", r.size),
        }
        .expect("writing to a string");
    }
    s
}

fn fig2a(cfg: &ExperimentConfig, seed: u64) -> Result<Vec<Artifact>> {
    let sampling = cfg.sampling.as_ref().expect("validated");
    let (graph, _) = load_graph(cfg.graph.as_ref().expect("validated"), seed)?;
    let params = cfg
        .sir
        .as_ref()
        .expect("validated")
        .params(stage_seed(seed, "sir"));
    let trace = simulate_sir(&graph, &params)?;
    let items = [TimedItem {
        label: "sir".into(),
        times: AdoptionTimes::from_trace(&trace),
    }];
    let rows = size_sweep(
        &graph,
        &items,
        &sampling_spec(sampling, SampleSize::Absolute(1)),
        &sampling.sample_sizes(),
        sampling.replicates,
        sampling.min_infected,
        sampling.usage_threshold,
        stage_seed(seed, "samples"),
    )?;

    let mut curves = String::from("cascade,step,infected,recovered,new_infections\n");
    for (c, curve) in trace.curves.iter().enumerate() {
        for t in 0..curve.infected.len() {
            writeln!(
                curves,
                "{c},{t},{},{},{}",
                curve.infected[t], curve.recovered[t], curve.new_infections[t]
            )
            .expect("writing to a string");
        }
    }
    let mut times = Vec::new();
    trace.write_csv(&mut times)?;

    let summary = json!({
        "node_count": graph.node_count(),
        "edge_count": graph.edge_count(),
        "sir": params,
        "ever_infected": trace.ever_infected(),
        "sampling": sampling,
        "rows": rows,
    });
    Ok(vec![
        Artifact::text("sweep.csv", sweep_csv(&rows)),
        Artifact::text("curves.csv", curves),
        Artifact {
            name: "infection_times.csv".into(),
            bytes: times,
        },
        Artifact::json("fig2a.json", &summary)?,
    ])
}

// ---------------------------------------------------------------- tags

/// Selected tags: explicit names in the given order, or tags ranked by total
/// uses (ties by name) after the born and user-count filters.
fn select_tags(stream: &EventStream, sel: Option<&TagSelection>) -> Result<Vec<TagId>> {
    let default = TagSelection::default();
    let sel = sel.unwrap_or(&default);
    if !sel.names.is_empty() {
        return sel.names.iter().map(|n| stream.tag_id(n)).collect();
    }
    let born: Option<Vec<TagId>> = sel
        .born
        .as_ref()
        .map(|b| born_tags(stream, b.quiet_days, b.min_uses));
    let mut ranked: Vec<(usize, String, TagId)> = all_timelines(stream)
        .into_iter()
        .filter(|t| t.unique_users >= sel.min_users.max(1))
        .filter(|t| born.as_ref().is_none_or(|b| b.contains(&t.tag)))
        .map(|t| (t.total_uses, stream.tag_name(t.tag).to_owned(), t.tag))
        .collect();
    ranked.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    if let Some(top) = sel.top {
        ranked.truncate(top);
    }
    Ok(ranked.into_iter().map(|r| r.2).collect())
}

fn timed_items(stream: &EventStream, tags: &[TagId]) -> Vec<TimedItem> {
    let timelines = all_timelines(stream);
    let origin = stream.window().start;
    tags.iter()
        .map(|&t| {
            let tl = timelines
                .iter()
                .find(|x| x.tag == t)
                .expect("selected tags have timelines");
            TimedItem {
                label: stream.tag_name(t).to_owned(),
                times: AdoptionTimes::from_timeline(tl, origin, SECONDS_PER_DAY),
            }
        })
        .collect()
}

// ---------------------------------------------------------------- fig2bc

fn fig2bc(cfg: &ExperimentConfig, seed: u64) -> Result<Vec<Artifact>> {
    let sampling = cfg.sampling.as_ref().expect("validated");
    let (graph, dict) = load_graph(cfg.graph.as_ref().expect("validated"), seed)?;
    let stream = load_stream(cfg, dict)?;
    let tags = select_tags(&stream, cfg.tags.as_ref())?;
    if tags.is_empty() {
        return Err(Error::InvalidParameter("no tags selected".into()));
    }
    let items = timed_items(&stream, &tags);
    let mut spec = sampling_spec(sampling, SampleSize::Absolute(1));
    if sampling.trim_to_active {
        spec.control_filter = Some(active_filter(&stream, &graph));
    }
    let rows = size_sweep(
        &graph,
        &items,
        &spec,
        &sampling.sample_sizes(),
        sampling.replicates,
        sampling.min_infected,
        sampling.usage_threshold,
        stage_seed(seed, "samples"),
    )?;
    let mut per_size = String::from("size,tag,replicates,mean_delta_t,sem\n");
    for r in &rows {
        for it in &r.items {
            if it.replicates > 0 {
                writeln!(
                    per_size,
                    "{},{},{},{},{}",
                    r.size,
                    csv_field(&it.label),
                    it.replicates,
                    it.mean,
                    it.sem
                )
                .expect("writing to a string");
            }
        }
    }

    let mut artifacts = vec![
        Artifact::text("sweep.csv", sweep_csv(&rows)),
        Artifact::text("sweep_tags.csv", per_size),
    ];
    let mut per_tag_json = None;
    if let Some(m) = &cfg.multi_sample {
        let per_tag = multi_sample_lead_times(
            &graph,
            &items,
            &spec.with_size(m.size),
            m.samples,
            m.min_users,
            m.min_samples,
            stage_seed(seed, "multi-sample"),
        )?;
        let mut csv = String::from("tag,samples,mean_delta_t,sem\n");
        for t in &per_tag {
            writeln!(
                csv,
                "{},{},{},{}",
                csv_field(&t.label),
                t.replicates,
                t.mean,
                t.sem
            )
            .expect("writing to a string");
        }
        artifacts.push(Artifact::text("per_tag.csv", csv));
        per_tag_json = Some(per_tag);
    }
    let hist = popularity_histogram(&stream);
    let mut pop = Vec::new();
    hist.write_csv(&mut pop).expect("writing to memory");
    artifacts.push(Artifact {
        name: "popularity.csv".into(),
        bytes: pop,
    });
    artifacts.push(Artifact::json(
        "fig2bc.json",
        &json!({
            "node_count": graph.node_count(),
            "events": stream.report(),
            "tags": items.iter().map(|i| &i.label).collect::<Vec<_>>(),
            "sampling": sampling,
            "rows": rows,
            "per_tag": per_tag_json,
        }),
    )?);
    Ok(artifacts)
}

// ---------------------------------------------------------------- fig3

#[derive(Serialize)]
struct TagResult {
    tag: String,
    status: String,
    users: usize,
    uses: usize,
    lead_time: Option<LeadTimeSummary>,
    null: Option<NullSummary>,
    components: Option<ComponentReport>,
    detection: Option<DetectionReport>,
}

fn fig3(cfg: &ExperimentConfig, seed: u64) -> Result<Vec<Artifact>> {
    let sampling = cfg.sampling.as_ref().expect("validated");
    let (graph, dict) = load_graph(cfg.graph.as_ref().expect("validated"), seed)?;
    let stream = load_stream(cfg, dict)?;
    let tags = select_tags(&stream, cfg.tags.as_ref())?;
    let size = sampling.sample_sizes()[0];
    let mut spec = sampling_spec(sampling, size);
    if sampling.trim_to_active && sampling.universe == Universe::FollowGraph {
        spec.control_filter = Some(active_filter(&stream, &graph));
    }
    let pool = match cfg.null.as_ref().map(|n| n.scope) {
        Some(NullScope::Global) => Some(global_time_pool(&stream)),
        _ => None,
    };
    let detection = cfg.detection.clone().unwrap_or_default();
    let window = stream.window();
    let horizon = (window.duration() + 1) as f64 / SECONDS_PER_DAY as f64;
    let results: Vec<TagResult> = tags
        .par_iter()
        .map(|&tag| {
            let name = stream.tag_name(tag).to_owned();
            let per_tag = tag_seed(seed, &name);
            let mut res = TagResult {
                tag: name.clone(),
                status: "ok".into(),
                users: 0,
                uses: 0,
                lead_time: None,
                null: None,
                components: None,
                detection: None,
            };
            let source = match TagSource::new(&stream, &name, &graph, sampling.universe) {
                Ok(s) => s,
                Err(e) => {
                    res.status = e.to_string();
                    return res;
                }
            };
            res.users = source.unique_users;
            res.uses = source.uses.len();
            res.components = Some(match sampling.universe {
                Universe::HashtagNetwork => connected_components(&source.graph),
                Universe::FollowGraph => match hashtag_network(&stream, &graph, &name) {
                    Ok(net) => connected_components(&net.graph),
                    Err(_) => ComponentReport {
                        component_count: 0,
                        component_sizes: Vec::new(),
                        giant_fraction: 0.0,
                    },
                },
            });
            match lead_time_experiment(
                &source.graph,
                &source.times,
                &spec,
                sampling.replicates,
                sampling.min_infected,
                per_tag,
            ) {
                Ok(observed) => {
                    if let Some(n) = &cfg.null {
                        match shuffle_null_for_tag(
                            &source,
                            &spec,
                            n.replicates,
                            sampling.min_infected,
                            pool.as_deref(),
                            per_tag,
                        ) {
                            Ok(mut null) => {
                                null.compare(observed.mean);
                                res.null = Some(null);
                            }
                            Err(e) => res.status = format!("null: {e}"),
                        }
                    }
                    res.lead_time = Some(observed);
                }
                Err(e) => res.status = e.to_string(),
            }
            let det_cfg = DetectionConfig {
                alpha: detection.alpha,
                consecutive_required: detection.consecutive_required,
                bucket: detection.bucket_days,
                start: 0.0,
                end: horizon,
                test: detection.test,
            };
            match draw_samples(
                &source.graph,
                &spec,
                rng::derive(per_tag, &[rng::label("detect")]),
            )
            .and_then(|pair| realtime_detect(&source.times, &pair.sensor, &pair.control, &det_cfg))
            {
                Ok(rep) => res.detection = Some(rep),
                Err(e) => {
                    if res.status == "ok" {
                        res.status = format!("detection: {e}");
                    }
                }
            }
            res
        })
        .collect();

    let mut csv = String::from(
        "tag,status,users,uses,mean_delta_t,sem,fraction_negative,replicates,skipped,\
         null_mean,null_sem,null_lo,null_hi,observed_rank,two_sided_p,outside_null,\
         components,giant_fraction,detection_day,peak_day,catch_up_day\n",
    );
    let mut artifacts = Vec::new();
    for (i, r) in results.iter().enumerate() {
        let lt = r.lead_time.as_ref();
        let nl = r.null.as_ref();
        let cp = r.components.as_ref();
        let dt = r.detection.as_ref();
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            csv_field(&r.tag),
            csv_field(&r.status),
            r.users,
            r.uses,
            opt(lt.map(|x| x.mean)),
            opt(lt.map(|x| x.sem)),
            opt(lt.map(|x| x.fraction_negative)),
            opt_usize(lt.map(|x| x.replicates)),
            opt_usize(lt.map(|x| x.skipped)),
            opt(nl.map(|x| x.mean())),
            opt(nl.map(|x| x.sem())),
            opt(nl.map(|x| x.band.0)),
            opt(nl.map(|x| x.band.1)),
            opt(nl.and_then(|x| x.observed_rank)),
            opt(nl.and_then(|x| x.two_sided_p)),
            nl.and_then(|x| x.outside_band)
                .map(|b| b.to_string())
                .unwrap_or_default(),
            opt_usize(cp.map(|x| x.component_count)),
            opt(cp.map(|x| x.giant_fraction)),
            opt_usize(dt.and_then(|x| x.detection_day)),
            opt_usize(dt.and_then(|x| x.peak_incidence_day)),
            opt_usize(dt.and_then(|x| x.control_catch_up_day)),
        )
        .expect("writing to a string");
        if let Some(d) = dt {
            let mut buf = Vec::new();
            d.write_csv(&mut buf).expect("writing to memory");
            artifacts.push(Artifact {
                name: format!("incidence/{}.csv", file_stem(i, &r.tag)),
                bytes: buf,
            });
        }
    }

    let means: Vec<f64> = results
        .iter()
        .filter_map(|r| r.lead_time.as_ref().map(|l| l.mean))
        .collect();
    let fractions: Vec<f64> = results
        .iter()
        .filter_map(|r| r.lead_time.as_ref().map(|l| l.fraction_negative))
        .collect();
    let outside: Vec<f64> = results
        .iter()
        .filter_map(|r| r.null.as_ref().and_then(|n| n.outside_band))
        .map(|b| if b { 1.0 } else { 0.0 })
        .collect();
    let aggregate = |v: &[f64]| {
        (!v.is_empty()).then(|| json!({"mean": stats::mean(v), "sem": stats::sem(v), "n": v.len()}))
    };
    let summary = json!({
        "node_count": graph.node_count(),
        "events": stream.report(),
        "sample_size": size,
        "universe": sampling.universe,
        "replicates": sampling.replicates,
        "null_replicates": cfg.null.as_ref().map(|n| n.replicates),
        "aggregate": {
            "mean_delta_t": aggregate(&means),
            "fraction_negative": aggregate(&fractions),
            "fraction_outside_null": aggregate(&outside),
        },
        "tags": results,
    });
    artifacts.insert(0, Artifact::text("per_tag.csv", csv));
    artifacts.push(Artifact::json("fig3.json", &summary)?);
    Ok(artifacts)
}

// ---------------------------------------------------------------- fig4

const ACTIVITY_FIELDS: [&str; 6] = [
    "messages",
    "messages_with_tags",
    "tag_uses",
    "unique_tags",
    "uses_per_unique_tag",
    "unique_tags_per_message",
];

fn fig4(cfg: &ExperimentConfig, seed: u64) -> Result<Vec<Artifact>> {
    let sampling = cfg.sampling.as_ref().expect("validated");
    let (graph, dict) = load_graph(cfg.graph.as_ref().expect("validated"), seed)?;
    let stream = load_stream(cfg, dict)?;
    let mut spec = sampling_spec(sampling, sampling.sample_sizes()[0]);
    if sampling.trim_to_active {
        spec.control_filter = Some(active_filter(&stream, &graph));
    }
    let index = ActivityIndex::new(&stream);
    let sample_seed = stage_seed(seed, "samples");
    let profiles = (0..sampling.replicates)
        .into_par_iter()
        .map(|r| {
            let pair = draw_samples(&graph, &spec, replicate_seed(sample_seed, r))?;
            Ok((index.profile(&pair.sensor), index.profile(&pair.control)))
        })
        .collect::<Result<Vec<_>>>()?;

    let fields = |p: &crate::events::ActivityProfile| -> [FieldSummary; 6] {
        [
            p.messages,
            p.messages_with_tags,
            p.tag_uses,
            p.unique_tags,
            p.uses_per_unique_tag,
            p.unique_tags_per_message,
        ]
    };
    let mut activity = String::from("replicate,group,users,absent_users");
    for f in ACTIVITY_FIELDS {
        write!(activity, ",{f}").expect("writing to a string");
    }
    activity.push('\n');
    let mut diversity = String::from(
        "replicate,group,min_messages,max_messages,users,mean_unique_tags,sem_unique_tags\n",
    );
    let mut per_group: BTreeMap<&str, Vec<[f64; 6]>> = BTreeMap::new();
    for (r, (sensor, control)) in profiles.iter().enumerate() {
        for (group, p) in [("sensor", sensor), ("control", control)] {
            let f = fields(p);
            write!(activity, "{r},{group},{},{}", p.rows.len(), p.absent_users)
                .expect("writing to a string");
            for x in &f {
                write!(activity, ",{}", x.mean).expect("writing to a string");
            }
            activity.push('\n');
            per_group.entry(group).or_default().push(f.map(|x| x.mean));
            for b in &p.diversity_by_activity {
                writeln!(
                    diversity,
                    "{r},{group},{},{},{},{},{}",
                    b.min_messages, b.max_messages, b.users, b.unique_tags.mean, b.unique_tags.sem
                )
                .expect("writing to a string");
            }
        }
    }
    let groups: BTreeMap<&str, serde_json::Value> = per_group
        .iter()
        .map(|(g, rows)| {
            let obj: serde_json::Map<String, serde_json::Value> = ACTIVITY_FIELDS
                .iter()
                .enumerate()
                .map(|(i, f)| {
                    let v: Vec<f64> = rows.iter().map(|row| row[i]).collect();
                    (
                        f.to_string(),
                        json!({"mean": stats::mean(&v), "sem": stats::sem(&v)}),
                    )
                })
                .collect();
            (*g, serde_json::Value::Object(obj))
        })
        .collect();
    let summary = json!({
        "node_count": graph.node_count(),
        "events": stream.report(),
        "has_message_file": stream.messages().is_some(),
        "replicates": sampling.replicates,
        "groups": groups,
    });
    Ok(vec![
        Artifact::text("activity.csv", activity),
        Artifact::text("diversity.csv", diversity),
        Artifact::json("fig4.json", &summary)?,
    ])
}

// ---------------------------------------------------------------- samplemath

fn samplemath(cfg: &ExperimentConfig) -> Result<Vec<Artifact>> {
    let m = cfg.samplemath.as_ref().expect("validated");
    let n = m.design.population;
    let grid: Vec<u64> = if m.grid.is_empty() {
        let step = m.grid_step.unwrap_or_else(|| (n / 1000).max(1));
        let mut g: Vec<u64> = (0..=n).step_by(step as usize).collect();
        if g.last() != Some(&n) {
            g.push(n);
        }
        g
    } else {
        m.grid.clone()
    };
    let curve = detection_curve(&m.design, &grid)?;
    let mut buf = Vec::new();
    write_curve_csv(&curve, &mut buf).expect("writing to memory");
    let half = curve.iter().find(|(_, p)| *p >= 0.5).map(|c| c.0);
    Ok(vec![
        Artifact {
            name: "curve.csv".into(),
            bytes: buf,
        },
        Artifact::json(
            "samplemath.json",
            &json!({
                "design": m.design,
                "points": curve.len(),
                "smallest_x_with_half_probability": half,
            }),
        )?,
    ])
}
