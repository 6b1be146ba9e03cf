#include "dpf/cli/runner.hpp"

#include <chrono>
#include <set>

#include <spdlog/spdlog.h>

#include "dpf/cleanse/filter.hpp"
#include "dpf/cli/review.hpp"
#include "dpf/core/hash.hpp"
#include "dpf/core/serialize.hpp"
#include "dpf/core/text.hpp"
#include "dpf/core/validate.hpp"
#include "dpf/dataset/pairs.hpp"
#include "dpf/eval/metrics.hpp"
#include "dpf/genpipe/parse.hpp"
#include "dpf/util/parallel.hpp"
#include "dpf/util/rng.hpp"

namespace dpf::cli {
namespace {

using nlohmann::json;

// Per-item results of a long stage, keyed by the stage's cache key so a
// journal from different inputs is never replayed.
class Journal {
public:
  Journal(fs::path path, std::string key, bool resume) : path_(std::move(path)), key_(std::move(key)) {
    if (!resume) {
      fs::remove(path_);
      return;
    }
    if (!fs::exists(path_)) return;
    for (const auto& v : read_jsonl_values(path_)) {
      if (v.value("key", "") == key_) done_[v.at("index").get<std::size_t>()] = v.at("result");
    }
    if (!done_.empty()) spdlog::info("resuming: {} items already journaled", done_.size());
  }

  const json* find(std::size_t i) const {
    auto it = done_.find(i);
    return it == done_.end() ? nullptr : &it->second;
  }

  void append(std::size_t i, const json& result) {
    std::lock_guard lock(mu_);
    if (!out_) out_ = std::make_unique<JsonlAppender>(path_);
    out_->append({{"key", key_}, {"index", i}, {"result", result}});
  }

private:
  fs::path path_;
  std::string key_;
  std::map<std::size_t, json> done_;
  std::mutex mu_;
  std::unique_ptr<JsonlAppender> out_;
};

// Runs fn over [0, n) in parallel; results come back in index order. Items
// that throw are logged and counted, and the stage ends in PartialFailure
// once the completed ones are journaled.
template <class Fn>
std::vector<json> run_items(const std::string& stage, std::size_t n, std::size_t workers, Journal& journal, Fn fn) {
  std::vector<json> results(n);
  auto errors = parallel_for(n, workers, [&](std::size_t i) {
    if (const json* done = journal.find(i)) {
      results[i] = *done;
      return;
    }
    results[i] = fn(i);
    journal.append(i, results[i]);
  });
  std::size_t failed = 0;
  std::string first;
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    ++failed;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      spdlog::warn("{}: item {} failed: {}", stage, i, e.what());
      if (first.empty()) first = e.what();
    }
  }
  if (failed) {
    throw PartialFailure(stage + ": " + std::to_string(failed) + " of " + std::to_string(n) +
                         " items failed (first: " + first + "); rerun with --resume");
  }
  return results;
}

template <class T>
std::map<core::Id, T> by_id(const std::vector<T>& v) {
  std::map<core::Id, T> out;
  for (const auto& x : v) out.emplace(x.id, x);
  return out;
}

std::string jsonl(const std::vector<json>& rows) {
  std::string out;
  for (const auto& r : rows) out += r.dump() + "\n";
  return out;
}

void put(const fs::path& run_dir, Runner::Output& o, const std::string& rel, std::string_view content) {
  write_file_atomic(run_dir / rel, content);
  o.files.push_back(rel);
}

template <class T>
void put_records(const fs::path& run_dir, Runner::Output& o, const std::string& rel, const std::vector<T>& v) {
  put(run_dir, o, rel, to_jsonl(v));
}

std::string last_user_text(const std::vector<core::Turn>& turns) {
  for (auto it = turns.rbegin(); it != turns.rend(); ++it) {
    if (it->role == core::Role::user) return it->text;
  }
  return {};
}

}  // namespace

std::vector<std::string> stage_reads(const std::string& stage) {
  using namespace files;
  static const std::map<std::string, std::vector<std::string>> reads{
      {"topics", {}},
      {"review-topics", {kTopics}},
      {"peps", {kTopicsReviewed}},
      {"review-peps", {kPeps}},
      {"attributes", {}},
      {"dialogues", {kTopicsReviewed, kPepsReviewed, kAttributes}},
      {"critique-revise", {kPepsReviewed, kDialogues}},
      {"filter", {kPepsReviewed, kTruncated, kRevisions}},
      {"split", {kPepsReviewed, kTruncated, kRevisions, kFilterReport}},
      {"export", {kTopicsReviewed, kPepsReviewed, kAttributes, kTruncated, kRevisions, kFilterReport, kPairs}},
      {"evaluate", {kPepsReviewed, kTruncated, kPairs}},
      {"report", {kFilterReport, kSplit, kPairs, kEvalRecords}},
  };
  return reads.at(stage);
}

Runner::Runner(RunConfig cfg, BackendFactory factory) : cfg_(std::move(cfg)), factory_(std::move(factory)) {
  topological_order(stage_graph());
}

const llmio::Client& Runner::client(const std::string& role) {
  std::lock_guard lock(clients_mu_);
  auto& slot = clients_[role];
  if (!slot) {
    const auto& bc = cfg_.backends.at(role);
    slot = std::make_unique<llmio::Client>(bc, factory_ ? factory_(role, bc) : nullptr);
  }
  return *slot;
}

int Runner::run(const std::string& stage, const RunOptions& opts) {
  try {
    auto counts = run_stage(stage, opts);
    spdlog::info("{}: {} in, {} out, {} rejected{}", stage, counts.input, counts.output, counts.rejected_total(),
                 last_cache_hit_ ? " (cached)" : "");
    return kOk;
  } catch (const ConfigInvalid& e) {
    spdlog::error("{}: invalid configuration: {}", stage, e.what());
    return kConfig;
  } catch (const MissingUpstream& e) {
    spdlog::error("{}: {}", stage, e.what());
    return kUpstreamMissing;
  } catch (const PartialFailure& e) {
    spdlog::error("{}", e.what());
    return kPartial;
  } catch (const std::exception& e) {
    spdlog::error("{}: {}", stage, e.what());
    return kFailure;
  }
}

StageCounts Runner::run_stage(const std::string& stage, const RunOptions& opts) {
  if (!is_stage(stage)) throw ConfigInvalid("unknown stage '" + stage + "'");
  last_cache_hit_ = false;
  for (const auto& up : stage_graph().at(stage)) {
    auto m = read_manifest(cfg_.run_dir, up);
    bool present = m && m->status == "complete";
    if (present) {
      for (const auto& [rel, sha] : m->outputs) present = present && fs::exists(path(rel));
    }
    if (!present) throw MissingUpstream("stage '" + stage + "' needs '" + up + "' to complete first");
  }

  Manifest m;
  m.stage = stage;
  m.config_hash = stage_config_hash(cfg_, stage);
  for (const auto& rel : stage_reads(stage)) m.inputs[rel] = hash_file(path(rel));
  m.cache_key = sha256_hex(json{{"stage", stage}, {"config", m.config_hash}, {"inputs", m.inputs}}.dump());

  const bool is_review = stage == "review-topics" || stage == "review-peps";
  if (!is_review) {
    if (auto old = read_manifest(cfg_.run_dir, stage); old && outputs_current(cfg_.run_dir, *old, m.cache_key)) {
      last_cache_hit_ = true;
      return old->counts;
    }
  }

  const auto t0 = std::chrono::steady_clock::now();
  Output out;
  try {
    if (stage == "topics") out = topics();
    else if (stage == "review-topics") out = review("topics", opts);
    else if (stage == "peps") out = peps();
    else if (stage == "review-peps") out = review("peps", opts);
    else if (stage == "attributes") out = attributes();
    else if (stage == "dialogues") out = dialogues(m.cache_key, opts.resume);
    else if (stage == "critique-revise") out = critique_revise(m.cache_key, opts.resume);
    else if (stage == "filter") out = filter();
    else if (stage == "split") out = split();
    else if (stage == "export") out = export_stage();
    else if (stage == "evaluate") out = evaluate(m.cache_key, opts.resume);
    else out = report();
  } catch (const PartialFailure&) {
    m.status = "partial";
    write_manifest(cfg_.run_dir, m);
    throw;
  }

  for (const auto& rel : out.files) m.outputs[rel] = hash_file(path(rel));
  m.counts = out.counts;
  if (!m.counts.conserved()) {
    throw Error(stage + ": counts do not balance (" + std::to_string(m.counts.input) + " in, " +
                std::to_string(m.counts.output) + " out, " + std::to_string(m.counts.rejected_total()) + " rejected)");
  }
  write_manifest(cfg_.run_dir, m);
  // only an interrupted stage needs its journal; completed ones would leave
  // a file whose line order depends on thread scheduling
  fs::remove(path("journals/" + stage + ".jsonl"));
  write_timing(cfg_.run_dir, stage,
               std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return m.counts;
}

Runner::Output Runner::topics() {
  Output o;
  auto generated = genpipe::gen_topics(cfg_.n_topics, client("topic_model"), cfg_.gen);
  std::vector<core::Topic> all;
  for (const auto& t : cfg_.manual_topics) all.push_back(core::make_topic(t, core::TopicSource::manual));
  all.insert(all.end(), generated.begin(), generated.end());
  auto unique = cleanse::dedup(all, [](const core::Topic& t) { return t.text; });
  o.counts.input = all.size();
  o.counts.output = unique.size();
  if (all.size() != unique.size()) o.counts.rejected["duplicate"] = all.size() - unique.size();
  put_records(cfg_.run_dir, o, files::kTopics, unique);
  return o;
}

Runner::Output Runner::review(const std::string& kind, const RunOptions& opts) {
  Output o;
  const bool topics = kind == "topics";
  ReviewJournal journal(path("review/" + kind + ".decisions.jsonl"));
  std::vector<ReviewItem> items;
  std::vector<core::Topic> ts;
  std::vector<core::PinkElephantPair> ps;
  if (topics) {
    ts = read_jsonl<core::Topic>(path(files::kTopics));
    for (const auto& t : ts) {
      // hand-entered topics need no second look
      if (t.source == core::TopicSource::manual && !journal.status(t.id)) {
        journal.record(t.id, core::ReviewStatus::approved);
      }
      items.push_back({t.id, t.text});
    }
  } else {
    ps = read_jsonl<core::PinkElephantPair>(path(files::kPeps));
    for (const auto& p : ps) items.push_back({p.id, p.pink + ", " + p.grey});
  }

  ReviewSummary s = opts.decisions ? review_with_rules(items, load_decisions(*opts.decisions), journal)
                                   : review_interactive(items, journal, *opts.in, *opts.out);
  auto status_of = [&](const core::Id& id) { return journal.status(id).value_or(core::ReviewStatus::candidate); };
  if (topics) {
    for (auto& t : ts) t.status = status_of(t.id);
    put_records(cfg_.run_dir, o, files::kTopicsReviewed, ts);
  } else {
    for (auto& p : ps) p.status = status_of(p.id);
    put_records(cfg_.run_dir, o, files::kPepsReviewed, ps);
  }
  o.counts.input = items.size();
  o.counts.output = s.approved;
  if (s.rejected) o.counts.rejected["rejected"] = s.rejected;
  if (s.undecided) o.counts.rejected["undecided"] = s.undecided;
  return o;
}

Runner::Output Runner::peps() {
  Output o;
  std::vector<core::Topic> approved;
  for (auto& t : read_jsonl<core::Topic>(path(files::kTopicsReviewed))) {
    if (t.status == core::ReviewStatus::approved) approved.push_back(std::move(t));
  }
  if (approved.empty()) throw MissingUpstream("no approved topics; run review-topics");

  const auto& c = client("topic_model");
  std::vector<std::vector<core::PinkElephantPair>> per_topic(approved.size());
  std::vector<std::size_t> unparseable(approved.size(), 0);
  auto errors = parallel_for(approved.size(), c.config().max_concurrency, [&](std::size_t i) {
    try {
      per_topic[i] = genpipe::gen_peps(approved[i], c, cfg_.gen);
    } catch (const genpipe::UnparseableList& e) {
      spdlog::warn("peps: topic '{}': {}", approved[i].text, e.what());
      unparseable[i] = 1;
    }
  });
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
  }

  std::vector<core::PinkElephantPair> all, unique;
  for (const auto& v : per_topic) all.insert(all.end(), v.begin(), v.end());
  if (cfg_.gen.emit_swapped) {
    unique = cleanse::dedup(all, [](const core::PinkElephantPair& p) { return p.pink + '\x1f' + p.grey; });
  } else {
    unique = cleanse::dedup(all, [](const core::PinkElephantPair& p) { return core::unordered_pair_key(p.pink, p.grey); });
  }
  o.counts.input = all.size();
  o.counts.output = unique.size();
  if (all.size() != unique.size()) o.counts.rejected["duplicate"] = all.size() - unique.size();
  std::size_t bad = 0;
  for (auto u : unparseable) bad += u;
  if (bad) o.counts.info["topics_unparseable"] = bad;
  put_records(cfg_.run_dir, o, files::kPeps, unique);
  return o;
}

Runner::Output Runner::attributes() {
  Output o;
  auto attrs = genpipe::gen_attributes(cfg_.n_attributes, client("topic_model"), cfg_.gen);
  o.counts.input = o.counts.output = attrs.size();
  put_records(cfg_.run_dir, o, files::kAttributes, attrs);
  return o;
}

Runner::Output Runner::dialogues(const std::string& key, bool resume) {
  Output o;
  auto topics = by_id(read_jsonl<core::Topic>(path(files::kTopicsReviewed)));
  std::vector<core::PinkElephantPair> peps;
  for (auto& p : read_jsonl<core::PinkElephantPair>(path(files::kPepsReviewed))) {
    if (p.status == core::ReviewStatus::approved && topics.contains(p.topic_id)) peps.push_back(std::move(p));
  }
  auto attrs = read_jsonl<core::Attribute>(path(files::kAttributes));
  if (peps.empty()) throw MissingUpstream("no approved PEPs; run review-peps");
  if (attrs.empty()) throw MissingUpstream("no attributes");

  const auto& c = client("generator");
  Journal journal(path("journals/dialogues.jsonl"), key, resume);
  auto results = run_items("dialogues", cfg_.n_dialogues, c.config().max_concurrency, journal, [&](std::size_t i) {
    const auto& pep = peps[i % peps.size()];
    Rng rng(cfg_.seed, "attribute:" + std::to_string(i));
    const auto& attr = attrs[rng.index(attrs.size())];
    auto rejected = [&](const char* reason, const std::exception& e) {
      return json{{"rejected", reason}, {"detail", e.what()}, {"pep_id", pep.id}, {"attribute_id", attr.id}};
    };
    try {
      return json{{"dialogue", genpipe::gen_dialogue(pep, attr, topics.at(pep.topic_id), c, cfg_.gen, i)}};
    } catch (const genpipe::RoleOrderError& e) {
      return rejected("role_order", e);
    } catch (const genpipe::ParseError& e) {
      return rejected("parse_error", e);
    } catch (const genpipe::DialogueLengthError& e) {
      return rejected("length", e);
    }
  });

  std::vector<core::Dialogue> kept;
  std::vector<json> rejected;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i].contains("dialogue")) {
      kept.push_back(results[i]["dialogue"].get<core::Dialogue>());
    } else {
      auto r = results[i];
      r["index"] = i;
      ++o.counts.rejected[r["rejected"].get<std::string>()];
      rejected.push_back(std::move(r));
    }
  }
  o.counts.input = results.size();
  o.counts.output = kept.size();
  put_records(cfg_.run_dir, o, files::kDialogues, kept);
  put(cfg_.run_dir, o, files::kDialoguesRejected, jsonl(rejected));
  return o;
}

Runner::Output Runner::critique_revise(const std::string& key, bool resume) {
  Output o;
  auto peps = by_id(read_jsonl<core::PinkElephantPair>(path(files::kPepsReviewed)));
  auto ds = read_jsonl<core::Dialogue>(path(files::kDialogues));
  const auto& gen = client("generator");
  const llmio::Client* embedder = cfg_.use_embeddings ? &client("embedder") : nullptr;
  cleanse::MentionDetector detector(cfg_.filter, embedder);

  Journal journal(path("journals/critique-revise.jsonl"), key, resume);
  auto results = run_items("critique-revise", ds.size(), gen.config().max_concurrency, journal, [&](std::size_t i) {
    const auto& pep = peps.at(ds[i].pep_id);
    auto t = cleanse::truncate_at_first_agent_mention(ds[i], pep.pink, detector);
    json r{{"dialogue", t.dialogue}, {"flag", cleanse::to_string(t.flag)}, {"original_turns", t.original_turns}};
    try {
      auto crit = genpipe::critique(t.dialogue, pep, gen, cfg_.gen);
      r["revision"] = genpipe::revise(t.dialogue, pep, crit, gen, cfg_.gen);
    } catch (const genpipe::EmptyCompletion& e) {
      r["rejected"] = "empty_completion";
      r["detail"] = e.what();
    }
    return r;
  });

  std::vector<json> truncated, truncations, revisions, rejected;
  for (const auto& r : results) {
    const auto id = r["dialogue"]["id"].get<std::string>();
    truncated.push_back(r["dialogue"]);
    truncations.push_back({{"dialogue_id", id},
                           {"flag", r["flag"]},
                           {"original_turns", r["original_turns"]},
                           {"turns", r["dialogue"]["turns"].size()}});
    ++o.counts.info[r["flag"].get<std::string>()];
    if (r.contains("revision")) {
      revisions.push_back(r["revision"]);
    } else {
      rejected.push_back({{"dialogue_id", id}, {"reason", r["rejected"]}, {"detail", r["detail"]}});
      ++o.counts.rejected[r["rejected"].get<std::string>()];
    }
  }
  o.counts.input = results.size();
  o.counts.output = revisions.size();
  put(cfg_.run_dir, o, files::kTruncated, jsonl(truncated));
  put(cfg_.run_dir, o, files::kTruncations, jsonl(truncations));
  put(cfg_.run_dir, o, files::kRevisions, jsonl(revisions));
  put(cfg_.run_dir, o, files::kRevisionsRejected, jsonl(rejected));
  return o;
}

Runner::Output Runner::filter() {
  Output o;
  auto peps = by_id(read_jsonl<core::PinkElephantPair>(path(files::kPepsReviewed)));
  auto ds = by_id(read_jsonl<core::Dialogue>(path(files::kTruncated)));
  auto revs = read_jsonl<core::RevisionRecord>(path(files::kRevisions));
  const llmio::Client* embedder = cfg_.use_embeddings ? &client("embedder") : nullptr;
  cleanse::MentionDetector detector(cfg_.filter, embedder);
  const std::size_t workers = embedder ? embedder->config().max_concurrency : 1;

  std::vector<cleanse::FilterOutcome> outcomes(revs.size());
  auto errors = parallel_for(revs.size(), workers, [&](std::size_t i) {
    auto d = ds.find(revs[i].dialogue_id);
    if (d == ds.end()) {
      outcomes[i].dialogue_id = revs[i].dialogue_id;
      outcomes[i].problems.push_back("dialogue_id: no such dialogue");
      return;
    }
    outcomes[i] = cleanse::filter_pair(d->second, revs[i], peps.at(d->second.pep_id).pink, detector);
  });

  std::vector<json> parked;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const cleanse::DetectionUnavailable& e) {
      parked.push_back({{"dialogue_id", revs[i].dialogue_id}, {"detail", e.what()}});
    }
  }
  if (!parked.empty()) {
    write_file_atomic(path("filter_parked.jsonl"), jsonl(parked));
    throw PartialFailure("filter: " + std::to_string(parked.size()) +
                         " records parked because detection was unavailable; rerun filter");
  }

  for (const auto& r : outcomes) {
    if (r.kept) {
      ++o.counts.output;
    } else {
      ++o.counts.rejected[std::string(cleanse::to_string(r.reason))];
    }
  }
  o.counts.input = outcomes.size();
  put_records(cfg_.run_dir, o, files::kFilterReport, outcomes);
  return o;
}

Runner::Output Runner::split() {
  Output o;
  auto peps = by_id(read_jsonl<core::PinkElephantPair>(path(files::kPepsReviewed)));
  auto ds = by_id(read_jsonl<core::Dialogue>(path(files::kTruncated)));
  std::map<core::Id, core::RevisionRecord> revs;
  for (auto& r : read_jsonl<core::RevisionRecord>(path(files::kRevisions))) revs.emplace(r.dialogue_id, r);
  auto outcomes = read_jsonl<cleanse::FilterOutcome>(path(files::kFilterReport));

  std::vector<core::Id> kept;
  std::set<core::Id> pep_ids;
  for (const auto& r : outcomes) {
    if (!r.kept) continue;
    kept.push_back(r.dialogue_id);
    pep_ids.insert(ds.at(r.dialogue_id).pep_id);
  }
  auto assignment = dataset::split_by_pep({pep_ids.begin(), pep_ids.end()}, cfg_.split);

  std::vector<core::PreferencePair> pairs;
  std::vector<json> dropped;
  for (const auto& id : kept) {
    const auto& d = ds.at(id);
    try {
      auto p = dataset::build_preference_pair(d, revs.at(id), peps.at(d.pep_id), assignment.at(d.pep_id),
                                              cfg_.avoidance_template);
      if (auto problems = core::validate(p); !problems.empty()) {
        dropped.push_back({{"dialogue_id", id}, {"reason", "invalid"}, {"detail", json(problems)}});
        ++o.counts.rejected["invalid"];
        continue;
      }
      pairs.push_back(std::move(p));
    } catch (const dataset::DegeneratePair& e) {
      dropped.push_back({{"dialogue_id", id}, {"reason", "degenerate"}, {"detail", e.what()}});
      ++o.counts.rejected["degenerate"];
    }
  }
  json split_json = json::object();
  for (const auto& [pep, s] : assignment) split_json[pep] = core::to_string(s);
  for (const auto& p : pairs) ++o.counts.info[std::string("pairs_") + std::string(core::to_string(p.split))];
  o.counts.input = kept.size();
  o.counts.output = pairs.size();
  put(cfg_.run_dir, o, files::kSplit, split_json.dump(2) + "\n");
  put_records(cfg_.run_dir, o, files::kPairs, pairs);
  put(cfg_.run_dir, o, files::kPairsDropped, jsonl(dropped));
  return o;
}

Runner::Output Runner::export_stage() {
  Output o;
  auto topics = by_id(read_jsonl<core::Topic>(path(files::kTopicsReviewed)));
  auto peps = by_id(read_jsonl<core::PinkElephantPair>(path(files::kPepsReviewed)));
  auto attrs = by_id(read_jsonl<core::Attribute>(path(files::kAttributes)));
  auto pairs = read_jsonl<core::PreferencePair>(path(files::kPairs));
  std::map<core::Id, core::Dialogue> by_pair;
  for (auto& d : read_jsonl<core::Dialogue>(path(files::kTruncated))) by_pair.emplace(content_id("pair", {d.id}), d);
  std::map<core::Id, core::RevisionRecord> revs;
  for (auto& r : read_jsonl<core::RevisionRecord>(path(files::kRevisions))) revs.emplace(r.dialogue_id, r);
  std::map<core::Id, cleanse::FilterOutcome> outcomes;
  for (auto& r : read_jsonl<cleanse::FilterOutcome>(path(files::kFilterReport))) outcomes.emplace(r.dialogue_id, r);

  dataset::Provenance prov;
  std::map<core::Split, std::vector<core::PreferencePair>> parts{
      {core::Split::train, {}}, {core::Split::val, {}}, {core::Split::test, {}}};
  for (const auto& p : pairs) {
    const auto& d = by_pair.at(p.id);
    const auto& pep = peps.at(p.pep_id);
    json methods = json::array();
    for (const auto& v : outcomes.at(d.id).evidence) methods.push_back(core::to_string(v.method));
    prov[p.id] = {{"dialogue_id", d.id},
                  {"topic", topics.at(pep.topic_id).text},
                  {"pink", pep.pink},
                  {"grey", pep.grey},
                  {"attribute", attrs.at(d.attribute_id).text},
                  {"plan", d.plan},
                  {"generation", d.gen_meta},
                  {"critique", revs.at(d.id).critique},
                  {"filter_methods", methods}};
    parts[p.split].push_back(p);
  }

  for (const auto& [split, v] : parts) {
    const std::string name(core::to_string(split));
    for (auto f : cfg_.export_formats) {
      auto rel = "export/" + name + (f == dataset::ExportFormat::dpo_jsonl ? ".dpo.jsonl" : ".transcript.txt");
      put(cfg_.run_dir, o, rel, dataset::render_export(v, f, prov));
    }
  }
  put(cfg_.run_dir, o, files::kDpoConfig, dataset::to_json(cfg_.training).dump(2) + "\n");
  o.counts.input = o.counts.output = pairs.size();
  return o;
}

Runner::Output Runner::evaluate(const std::string& key, bool resume) {
  Output o;
  auto peps = by_id(read_jsonl<core::PinkElephantPair>(path(files::kPepsReviewed)));
  std::map<core::Id, core::Id> dialogue_of;
  for (auto& d : read_jsonl<core::Dialogue>(path(files::kTruncated))) dialogue_of.emplace(content_id("pair", {d.id}), d.id);
  std::vector<core::PreferencePair> test;
  for (auto& p : read_jsonl<core::PreferencePair>(path(files::kPairs))) {
    if (p.split == core::Split::test) test.push_back(std::move(p));
  }

  const auto& model = client("eval_model");
  const auto& judge = client("judge");
  Journal journal(path("journals/evaluate.jsonl"), key, resume);
  const std::size_t n = test.size() * 2;
  auto results = run_items("evaluate", n, model.config().max_concurrency, journal, [&](std::size_t i) {
    const auto& p = test[i / 2];
    const auto cond = i % 2 == 0 ? core::Condition::base : core::Condition::prompted;
    const auto& pep = peps.at(p.pep_id);
    auto r = eval::regenerate_final_turn(dialogue_of.at(p.id), p.context, pep, cond, model, cfg_.eval);
    auto v = eval::judge(pep.pink, pep.grey, last_user_text(p.context), r.generated_final, judge, cfg_.eval);
    r.judge_label = v.mentioned;
    r.judge_raw = v.raw;
    return json(r);
  });

  std::vector<core::EvalRecord> records;
  std::vector<eval::AnnotationItem> items;
  std::vector<json> key_rows;
  for (std::size_t i = 0; i < results.size(); ++i) {
    auto r = results[i].get<core::EvalRecord>();
    const auto& p = test[i / 2];
    const auto& pep = peps.at(p.pep_id);
    std::string transcript = genpipe::format_transcript(p.context);
    transcript += "AGENT: " + r.generated_final;
    auto aid = eval::annotation_id(r);
    items.push_back({aid, pep.pink, pep.grey, transcript});
    key_rows.push_back({{"record_id", aid},
                        {"dialogue_id", r.dialogue_id},
                        {"condition", core::to_string(r.condition)},
                        {"model", model.config().model},
                        {"judge_label", r.judge_label}});
    records.push_back(std::move(r));
  }
  o.counts.input = o.counts.output = test.size();
  o.counts.info["records"] = records.size();
  put_records(cfg_.run_dir, o, files::kEvalRecords, records);
  put(cfg_.run_dir, o, files::kAnnotation, eval::blind_annotation_csv(items, cfg_.seed));
  put(cfg_.run_dir, o, files::kAnnotationKey, jsonl(key_rows));
  return o;
}

Runner::Output Runner::report() {
  Output o;
  auto records = read_jsonl<core::EvalRecord>(path(files::kEvalRecords));
  if (records.empty()) throw MissingUpstream("report: no evaluation records (is the test split empty?)");
  auto metrics = eval::compute_metrics(records, true);
  auto filter_m = read_manifest(cfg_.run_dir, "filter");
  auto split_json = json::parse(read_file(path(files::kSplit)));
  auto pairs = read_jsonl<core::PreferencePair>(path(files::kPairs));

  std::string md = "# Run report\n\n## Pink elephant mention rates\n\n";
  md += eval::metrics_table(metrics, cfg_.backends.at("eval_model").model);
  md += "\n## Filter funnel\n\n";
  if (filter_m) {
    md += "| stage | count |\n|---|---|\n";
    md += "| input | " + std::to_string(filter_m->counts.input) + " |\n";
    md += "| kept | " + std::to_string(filter_m->counts.output) + " |\n";
    for (const auto& [reason, k] : filter_m->counts.rejected) md += "| " + reason + " | " + std::to_string(k) + " |\n";
  }
  std::map<std::string, std::size_t> pep_counts, pair_counts{{"train", 0}, {"val", 0}, {"test", 0}};
  for (const auto& [pep, s] : split_json.items()) ++pep_counts[s.get<std::string>()];
  for (const auto& p : pairs) ++pair_counts[std::string(core::to_string(p.split))];
  md += "\n## Split sizes\n\n| split | PEPs | pairs |\n|---|---|---|\n";
  for (const char* s : {"train", "val", "test"}) {
    md += std::string("| ") + s + " | " + std::to_string(pep_counts[s]) + " | " + std::to_string(pair_counts[s]) + " |\n";
  }
  put(cfg_.run_dir, o, files::kMetrics, json(metrics).dump(2) + "\n");
  put(cfg_.run_dir, o, files::kReport, md);
  o.counts.input = o.counts.output = records.size();
  return o;
}

}  // namespace dpf::cli
