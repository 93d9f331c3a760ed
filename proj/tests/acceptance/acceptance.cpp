// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
// Usage: acceptance [path-to-smartbag-cli]

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "gradcheck.hpp"
#include "random_frames.hpp"
#include "store_oracle.hpp"
#include "temp_dir.hpp"
#include "smartbag/alerts/alarm.hpp"
#include "smartbag/alerts/service.hpp"
#include "smartbag/alerts/sinks.hpp"
#include "smartbag/data/dataset.hpp"
#include "smartbag/gateway/gateway.hpp"
#include "smartbag/nn/model_io.hpp"
#include "smartbag/store/server.hpp"

using namespace smartbag;
using json = nlohmann::json;
using Seconds = std::chrono::duration<double>;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

class Stopwatch {
 public:
  double seconds() const { return Seconds(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string g_cli;
std::optional<nn::PackagedModel> g_model;  // from the training criterion, reused downstream

int run_cli(const std::string& args) {
  const std::string cmd = "'" + g_cli + "' " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

store::StorePath P(const std::string& s) { return *store::StorePath::parse(s); }

// ---- network ----------------------------------------------------------------

Outcome gradient_check() {
  Stopwatch watch;
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> depth(3, 5), width(1, 8), batch(1, 8);
  std::uniform_real_distribution<double> lambda(0.0, 2.0);
  constexpr int kNets = 40;
  double worst = 0;
  for (int n = 0; n < kNets; ++n) {
    std::vector<std::size_t> sizes(depth(rng));
    for (auto& s : sizes) s = width(rng);
    sizes.back() = std::max<std::size_t>(sizes.back(), 2);
    const double lam = n % 2 ? lambda(rng) : 0.0;
    // Fan-in scaled weights keep the softmax out of saturation, where the clamped
    // loss is flat and central differences lose all precision.
    const auto c = oracle::random_case(sizes, batch(rng), lam, rng, 1e-3, 1.0);
    const auto grads = nn::backward(c.layers, oracle::to_batch(c), c.lambda);
    worst = std::max(worst, oracle::max_relative_error(c, grads));
  }
  const double t = watch.seconds();
  return {worst <= 1e-5 && t < 10.0, fmt("max relative error %.2e over %d nets (limit 1e-5), %.2f s (limit 10 s)",
                                         worst, kNets, t)};
}

Outcome activation_properties() {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> len(1, 12), family(0, 3);
  std::uniform_real_distribution<double> shift(-100.0, 100.0);
  constexpr int kCorpus = 20000;
  int failures = 0;
  double worst_norm = 0, worst_shift = 0;
  for (int i = 0; i < kCorpus; ++i) {
    Eigen::VectorXd z(len(rng));
    switch (family(rng)) {
      case 0: z = z.unaryExpr([&](double) { return std::normal_distribution<double>(0, 1)(rng); }); break;
      case 1: z = z.unaryExpr([&](double) { return std::uniform_real_distribution<double>(-50, 50)(rng); }); break;
      case 2: z.setConstant(shift(rng)); break;
      default: z = z.unaryExpr([&](double) { return std::uniform_real_distribution<double>(-1e-9, 1e-9)(rng); });
    }
    const Eigen::VectorXd p = nn::softmax(z);
    const double norm_err = std::abs(p.sum() - 1.0);
    const Eigen::VectorXd shifted = z.array() + shift(rng);
    const double shift_err = (nn::softmax(shifted) - p).cwiseAbs().maxCoeff();
    const Eigen::VectorXd r = nn::relu(z);
    const bool idempotent = nn::relu(r) == r && (r.array() >= 0).all();
    worst_norm = std::max(worst_norm, norm_err);
    worst_shift = std::max(worst_shift, shift_err);
    failures += norm_err > 1e-12 || shift_err > 1e-12 || !idempotent;
  }
  return {failures == 0, fmt("%d vectors, %d failures; worst |sum-1| %.1e, worst shift deviation %.1e (limit 1e-12)",
                             kCorpus, failures, worst_norm, worst_shift)};
}

Outcome synthetic_training() {
  Stopwatch watch;
  const auto dataset = data::generate(data::default_profiles(), data::kDefaultRowCount, 42);
  const auto parts = data::split(dataset, 0.9, 42);
  nn::Hyperparams hyper;
  hyper.epochs = 10;
  hyper.batch_size = 128;
  hyper.seed = 42;
  const auto spec = nn::ModelSpec::default_spec();
  const auto result = nn::train(parts.train, spec, hyper, &parts.test);
  g_model = nn::import_model(nn::export_model(result.model, spec, dataset.vocabulary()));
  const auto eval = nn::evaluate(g_model->params, parts.test);
  const auto recall = eval.recall();
  const double min_recall = *std::min_element(recall.begin(), recall.end());
  const double t = watch.seconds();
  std::ostringstream per_class;
  for (std::size_t k = 0; k < recall.size(); ++k)
    per_class << (k ? " " : "") << dataset.vocabulary().name(k) << '=' << fmt("%.3f", recall[k]);
  return {eval.accuracy >= 0.95 && min_recall >= 0.90 && t < 60.0,
          fmt("test accuracy %.4f (>= 0.95), min recall %.3f (>= 0.90) [%s], %.1f s (limit 60 s)", eval.accuracy,
              min_recall, per_class.str().c_str(), t)};
}

Outcome train_determinism() {
  testutil::TempDir dir;
  const auto csv = dir.file("data.csv");
  if (run_cli("gen --n 1743 --seed 42 --out '" + csv + "'") != 0) return {false, "gen failed"};
  for (const char* name : {"a.bagm", "b.bagm"})
    if (run_cli("train --data '" + csv + "' --seed 42 --out '" + dir.file(name) + "'") != 0)
      return {false, "train failed"};
  const auto a = read_bytes(dir.file("a.bagm")), b = read_bytes(dir.file("b.bagm"));
  return {!a.empty() && a == b, fmt("two train runs wrote %zu and %zu bytes, %s", a.size(), b.size(),
                                    a == b ? "identical" : "different")};
}

Outcome model_round_trip() {
  nn::PackagedModel model = g_model ? *g_model
                                    : nn::PackagedModel{nn::ModelParams::zeros(nn::ModelSpec::default_spec()), {}};
  const auto first = nn::export_model(model.params, model.spec(), model.vocabulary);
  const auto imported = nn::import_model(first);
  const auto second = nn::export_model(imported.params, imported.spec(), imported.vocabulary);
  const auto again = nn::import_model(second);

  std::mt19937_64 rng(5);
  const auto profiles = data::default_profiles();
  std::uniform_int_distribution<std::size_t> cls(0, profiles.size() - 1);
  int same = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = data::sample_features(profiles[cls(rng)], rng);
    const auto p1 = nn::predict(imported.params, x), p2 = nn::predict(again.params, x);
    same += p1.class_index == p2.class_index && p1.probabilities == p2.probabilities;
  }
  const bool bytes_equal = first == second;
  return {bytes_equal && same == 100 && imported.vocabulary == model.vocabulary,
          fmt("re-export %s (%zu bytes); %d/100 identical predictions", bytes_equal ? "byte-identical" : "differs",
              first.size(), same)};
}

// ---- protocol ----------------------------------------------------------------

Outcome protocol() {
  std::mt19937_64 rng(99);
  int round_trip_failures = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto f = testgen::random_frame(rng);
    const auto parsed = proto::parse_frame(proto::encode_frame(f));
    auto* got = std::get_if<proto::SensorFrame>(&parsed);
    round_trip_failures += !got || !(*got == f);
  }
  int fuzz_accepted = 0;
  for (int i = 0; i < 10000; ++i) {
    fuzz_accepted += std::holds_alternative<proto::SensorFrame>(proto::parse_frame(testgen::fuzz_line(rng)));
  }
  long flips = 0, flips_accepted = 0;
  for (int i = 0; i < 200; ++i) {
    const auto line = proto::encode_frame(testgen::random_frame(rng));
    const auto star = line.rfind('*');
    for (std::size_t pos = 1; pos < star; ++pos)
      for (int bit = 0; bit < 8; ++bit) {
        auto bad = line;
        bad[pos] = static_cast<char>(bad[pos] ^ (1 << bit));
        ++flips;
        flips_accepted += std::holds_alternative<proto::SensorFrame>(proto::parse_frame(bad));
      }
  }
  return {round_trip_failures == 0 && flips_accepted == 0,
          fmt("10000 round trips, %d failures; 10000 fuzz lines parsed without crashing (%d accepted); "
              "%ld single-bit flips, %ld accepted",
              round_trip_failures, fuzz_accepted, flips, flips_accepted)};
}

// ---- store durability ---------------------------------------------------------

struct StoreOp {
  enum Kind { Patch, Append } kind;
  std::string path;
  json body;
};

// Draws the next operation given the oracle state, so a writer and a checker
// that share a seed and the acknowledged ids draw the same sequence.
StoreOp next_op(std::mt19937_64& rng, const oracle::StoreModel& model) {
  std::uniform_int_distribution<int> dev(0, 2), op(0, 9);
  const std::string device = "bags/D" + std::to_string(dev(rng));
  const int o = op(rng);
  if (o < 4) return {StoreOp::Patch, device + (o == 0 ? "/commands" : "/latest"), oracle::random_object(rng)};
  auto list = model.lists.find(device + "/history");
  if (o < 8 || list == model.lists.end()) return {StoreOp::Append, device + "/history", oracle::random_object(rng)};
  std::uniform_int_distribution<std::size_t> pick(0, list->second.size() - 1);
  const auto id = list->second[pick(rng)].id;
  return {StoreOp::Patch, device + "/history/" + id, oracle::random_object(rng)};
}

void apply(oracle::StoreModel& model, const StoreOp& op, const std::string& id) {
  if (op.kind == StoreOp::Patch)
    model.patch(op.path, op.body);
  else
    model.append(op.path, id, op.body);
}

// Child process: performs `ops` operations on a durable store, acknowledging
// each one on `fd` (the push id for appends, "-" for patches), then idles.
[[noreturn]] void store_writer(const std::string& log, std::uint64_t seed, int ops, int fd) {
  store::DocumentStore db({log, true, {}});
  std::mt19937_64 rng(seed);
  oracle::StoreModel model;
  for (int i = 0; i < ops; ++i) {
    const auto op = next_op(rng, model);
    std::string id = "-";
    if (op.kind == StoreOp::Patch)
      db.patch(P(op.path), op.body);
    else
      id = db.append_history(P(op.path), op.body);
    apply(model, op, id);
    id += '\n';
    if (::write(fd, id.data(), id.size()) != static_cast<ssize_t>(id.size())) ::_exit(3);
  }
  for (;;) ::pause();
}

oracle::StoreModel oracle_after(std::uint64_t seed, const std::vector<std::string>& acks, std::size_t n) {
  std::mt19937_64 rng(seed);
  oracle::StoreModel model;
  for (std::size_t i = 0; i < n; ++i) apply(model, next_op(rng, model), acks[i]);
  return model;
}

bool matches(const store::StoreState& state, const oracle::StoreModel& model) {
  if (state.documents != model.docs) return false;
  if (state.histories.size() != model.lists.size()) return false;
  for (const auto& [path, entries] : model.lists) {
    auto it = state.histories.find(path);
    if (it == state.histories.end() || it->second.size() != entries.size()) return false;
    for (std::size_t i = 0; i < entries.size(); ++i)
      if (it->second[i].id != entries[i].id || it->second[i].doc != entries[i].doc) return false;
  }
  return true;
}

// Runs the writer in a child, SIGKILLs it once `kill_after` acks arrived, and
// returns every ack it managed to send.
std::vector<std::string> run_and_kill(const std::string& log, std::uint64_t seed, int ops, int kill_after) {
  int fds[2];
  if (::pipe(fds) != 0) throw std::runtime_error("pipe failed");
  const pid_t pid = ::fork();
  if (pid < 0) throw std::runtime_error("fork failed");
  if (pid == 0) {
    ::close(fds[0]);
    store_writer(log, seed, ops, fds[1]);
  }
  ::close(fds[1]);
  std::vector<std::string> acks;
  std::string pending;
  char buf[4096];
  auto drain = [&](bool until_count) {
    while (!until_count || static_cast<int>(acks.size()) < kill_after) {
      const auto n = ::read(fds[0], buf, sizeof buf);
      if (n <= 0) return;
      pending.append(buf, static_cast<std::size_t>(n));
      for (auto nl = pending.find('\n'); nl != std::string::npos; nl = pending.find('\n')) {
        acks.push_back(pending.substr(0, nl));
        pending.erase(0, nl + 1);
      }
    }
  };
  drain(true);
  ::kill(pid, SIGKILL);
  ::waitpid(pid, nullptr, 0);
  drain(false);  // acks already in the pipe were acknowledged before the kill
  ::close(fds[0]);
  return acks;
}

Outcome store_durability() {
  testutil::TempDir dir;
  constexpr std::uint64_t kSeed = 31337;
  constexpr int kOps = 1000;
  std::vector<std::string> notes;
  bool ok = true;

  // Killed after finishing all operations.
  const auto full_log = dir.file("full.log");
  const auto acks = run_and_kill(full_log, kSeed, kOps, kOps);
  const auto model = oracle_after(kSeed, acks, acks.size());
  {
    store::DocumentStore reopened({full_log, false, {}});
    const bool same = acks.size() == kOps && matches(reopened.snapshot(), model);
    ok &= same;
    notes.push_back(fmt("%zu ops, kill, restart: %s", acks.size(), same ? "equals oracle" : "MISMATCH"));
  }

  // Killed mid-stream: the log holds every acknowledged op and at most one more.
  const auto mid_log = dir.file("mid.log");
  const auto mid_acks = run_and_kill(mid_log, kSeed + 1, kOps, kOps / 2);
  {
    store::DocumentStore reopened({mid_log, false, {}});
    const auto state = reopened.snapshot();
    auto prefix = oracle_after(kSeed + 1, mid_acks, mid_acks.size());
    bool same = matches(state, prefix);
    if (!same) {
      std::mt19937_64 rng(kSeed + 1);
      oracle::StoreModel next;
      for (std::size_t i = 0; i < mid_acks.size(); ++i) apply(next, next_op(rng, next), mid_acks[i]);
      const auto op = next_op(rng, next);
      std::string id = "-";
      if (op.kind == StoreOp::Append) {
        auto it = state.histories.find(op.path);
        if (it != state.histories.end() && !it->second.empty()) id = it->second.back().id;
      }
      apply(next, op, id);
      same = matches(state, next);
    }
    ok &= same;
    notes.push_back(fmt("kill after %zu acks: %s", mid_acks.size(), same ? "acknowledged prefix recovered" : "MISMATCH"));
  }

  // Truncated tails: cut inside record j, expect exactly the first j ops.
  std::vector<std::size_t> offsets{0};
  {
    const auto bytes = read_bytes(full_log);
    std::size_t pos = 0;
    while (pos + 4 <= bytes.size()) {
      const std::uint32_t len = bytes[pos] | bytes[pos + 1] << 8 | bytes[pos + 2] << 16 |
                                static_cast<std::uint32_t>(bytes[pos + 3]) << 24;
      pos += 4 + len + 4;
      offsets.push_back(pos);
    }
  }
  int truncations = 0, truncation_failures = 0;
  std::mt19937_64 rng(17);
  for (std::size_t j : {std::size_t{0}, std::size_t{1}, std::size_t{kOps / 3}, std::size_t{kOps - 1}}) {
    if (j + 1 >= offsets.size()) {
      ++truncation_failures;
      continue;
    }
    std::uniform_int_distribution<std::size_t> cut(offsets[j] + 1, offsets[j + 1] - 1);
    const auto path = dir.file("cut" + std::to_string(j) + ".log");
    std::filesystem::copy_file(full_log, path);
    std::filesystem::resize_file(path, cut(rng));
    store::DocumentStore reopened({path, false, {}});
    ++truncations;
    truncation_failures += !matches(reopened.snapshot(), oracle_after(kSeed, acks, j)) ||
                           !reopened.recovery().truncated_tail;
  }
  ok &= truncation_failures == 0;
  notes.push_back(fmt("%d truncated tails, %d mismatches", truncations, truncation_failures));

  std::string detail;
  for (const auto& n : notes) detail += (detail.empty() ? "" : "; ") + n;
  return {ok, detail};
}

// ---- services ------------------------------------------------------------------

/// A store server on an ephemeral port, serving until destroyed.
struct LiveStore {
  store::DocumentStore db;
  store::StoreServer server{db, {"127.0.0.1", 0, ""}};
  std::jthread thread;
  std::string url;

  LiveStore() {
    if (!server.bind()) throw std::runtime_error("cannot bind store server");
    thread = std::jthread([this] { server.serve(); });
    url = "http://127.0.0.1:" + std::to_string(server.port());
    store::HttpStoreClient probe(url);
    for (int i = 0; i < 200; ++i) {
      try {
        probe.get(P("probe"));
        return;
      } catch (const store::StoreUnavailable&) {
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
      }
    }
    throw std::runtime_error("store server did not come up");
  }
  ~LiveStore() { server.stop(); }
};

/// Notes the clock time at which the SOS frame leaves the source.
class InjectionProbe : public gateway::FrameSource {
 public:
  InjectionProbe(gateway::FrameSource& inner, gateway::Clock& clock) : inner_(inner), clock_(clock) {}
  std::optional<std::string> next_line(std::stop_token stop) override {
    auto line = inner_.next_line(stop);
    if (line) {
      auto parsed = proto::parse_frame(*line);
      if (auto* f = std::get_if<proto::SensorFrame>(&parsed); f && f->sos == 1) injected = clock_.now_ms();
    }
    return line;
  }
  std::atomic<std::int64_t> injected{-1};

 private:
  gateway::FrameSource& inner_;
  gateway::Clock& clock_;
};

/// Notes when the first SOS event arrives and whether its record already has an activity.
class DeliveryProbe : public alerts::EventSink {
 public:
  DeliveryProbe(gateway::Clock& clock, store::DocumentStore& db) : clock_(clock), db_(db) {}
  void deliver(const alerts::AlertEvent& event) override {
    if (event.kind != alerts::AlertKind::Sos || delivered >= 0) return;
    delivered = clock_.now_ms();
    for (const auto& e : db_.get_history(P("bags/" + event.device + "/history"), std::nullopt, 1u << 20))
      if (e.doc.value("sos", 0) == 1 && e.doc.contains("activity") && e.doc["activity"].is_string())
        activity_present = true;
  }
  std::atomic<std::int64_t> delivered{-1};
  std::atomic<bool> activity_present{false};

 private:
  gateway::Clock& clock_;
  store::DocumentStore& db_;
};

struct LatencyRun {
  int sos_lines = 0;
  bool activity_present = false;
  std::int64_t latency = -1;
  double seconds = 0;
};

constexpr std::int64_t kPushPeriod = 2000, kPollInterval = 1000;

// Full in-process stack over HTTP on a 10x clock. Every frame after the first
// is shifted by `phase` virtual ms, which moves the SOS frame relative to the
// gateway's push ticks.
LatencyRun sos_through_stack(std::int64_t phase) {
  Stopwatch watch;
  testutil::TempDir dir;

  const auto trace = dir.file("sos.trace");
  {
    gateway::SimulatorOptions opt;
    opt.seed = 3;
    opt.sos_at = 4;
    gateway::FrameSimulator sim(opt);
    std::ofstream out(trace);
    const std::int64_t t0 = 1700000000000;
    for (int i = 0; i < 8; ++i) out << proto::encode_frame(sim.next(t0 + 1000 * i + (i ? phase : 0)));
  }

  LiveStore live;
  gateway::ScaledClock clock(10.0);
  store::HttpStoreClient gateway_client(live.url), alerts_client(live.url);

  alerts::AlertServiceConfig config;
  config.devices = {"BAG1"};
  config.poll_interval_ms = kPollInterval;
  config.cursor_path.clear();
  const auto notify = dir.file("notifications.log");
  alerts::LogFileSink log_sink(notify);
  DeliveryProbe probe(clock, live.db);
  auto model = g_model ? *g_model : nn::PackagedModel{nn::ModelParams::zeros(nn::ModelSpec::default_spec()), {}};
  alerts::AlertService service(config, model, alerts_client, {&log_sink, &probe});

  gateway::GatewayCore core({"BAG1", kPushPeriod, 1024, true}, gateway_client);
  auto lines = gateway::LineSource::open_file(trace, &clock);
  InjectionProbe source(lines, clock);

  std::stop_source stop_alerts;
  std::jthread alerts_thread([&] { alerts::run_alertsvc(service, clock, stop_alerts.get_token()); });
  gateway::RunOptions run;
  run.exit_when_drained = true;
  gateway::run_gateway(core, source, clock, std::stop_token{}, run);
  const auto give_up = std::chrono::steady_clock::now() + std::chrono::seconds(3);
  while (probe.delivered < 0 && std::chrono::steady_clock::now() < give_up)
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  // One more poll interval so a duplicate would have surfaced.
  clock.sleep_until(clock.now_ms() + kPollInterval + 100, std::stop_token{});
  stop_alerts.request_stop();
  alerts_thread.join();

  LatencyRun out;
  for (const auto& e : alerts::read_notification_log(notify))
    out.sos_lines += e.kind == alerts::AlertKind::Sos && e.severity == alerts::Severity::Emergency;
  out.activity_present = probe.activity_present;
  if (probe.delivered >= 0 && source.injected >= 0) out.latency = probe.delivered - source.injected;
  out.seconds = watch.seconds();
  return out;
}

Outcome end_to_end_latency() {
  bool ok = true;
  std::string detail;
  for (std::int64_t phase : {0, 100, 1000, 1900}) {
    const auto r = sos_through_stack(phase);
    ok &= r.sos_lines == 1 && r.activity_present && r.latency >= 0 && r.latency <= kPushPeriod + kPollInterval &&
          r.seconds < 10.0;
    detail += fmt("%sphase %lld: %d SOS line(s), activity %s, latency %lld ms, %.2f s", detail.empty() ? "" : "; ",
                  static_cast<long long>(phase), r.sos_lines, r.activity_present ? "stored" : "MISSING",
                  static_cast<long long>(r.latency), r.seconds);
  }
  return {ok, detail + fmt(" (limits: latency %lld virtual ms, runtime 10 s per run)",
                           static_cast<long long>(kPushPeriod + kPollInterval))};
}

Outcome alarm_loop() {
  testutil::TempDir dir;
  LiveStore live;
  gateway::ScaledClock clock(10.0);
  store::HttpStoreClient client(live.url);
  const auto notify = dir.file("gateway-notifications.log");
  alerts::LogFileSink sink(notify);
  gateway::GatewayCore core({"BAG1", 2000, 1024, true}, client, [&](const gateway::AlarmNotice& n) {
    sink.deliver(alerts::alarm_triggered_event(n.device_id, n.issued_ts, n.acked_ts));
  });
  gateway::SimulatorOptions opt;
  gateway::SimulatorSource source(gateway::FrameSimulator(opt), clock, 1000);
  std::stop_source stop;
  std::jthread runner([&] { gateway::run_gateway(core, source, clock, stop.get_token()); });

  const int status = run_cli("alarm BAG1 --store " + live.url);
  const auto commands = P("bags/BAG1/commands");
  const auto give_up = std::chrono::steady_clock::now() + std::chrono::seconds(5);
  auto acknowledged = [&] {
    auto doc = live.db.get(commands);
    return doc && doc->value("alarm", -1) == 0;
  };
  while (!acknowledged() && std::chrono::steady_clock::now() < give_up)
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  // Two more push periods: a second event here would be a duplicate.
  clock.sleep_until(clock.now_ms() + 4000, std::stop_token{});
  stop.request_stop();
  runner.join();

  int events = 0;
  for (const auto& e : alerts::read_notification_log(notify)) events += e.kind == alerts::AlertKind::AlarmTriggered;
  const auto doc = live.db.get(commands).value_or(json::object());
  const bool reset = doc.value("alarm", -1) == 0 && doc.value("state", "") == "DELIVERED";
  return {status == 0 && events == 1 && reset,
          fmt("cli exit %d; %d ALARM_TRIGGERED event(s); command flag %s", status, events,
              doc.contains("alarm") ? doc["alarm"].dump().c_str() : "missing")};
}

}  // namespace

int main(int argc, char** argv) {
  g_cli = argc > 1 ? argv[1] : SMARTBAG_CLI;
  spdlog::set_level(spdlog::level::err);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient correctness", gradient_check},
      {"softmax/relu properties", activation_properties},
      {"synthetic training accuracy", synthetic_training},
      {"training determinism", train_determinism},
      {"model round trip", model_round_trip},
      {"protocol", protocol},
      {"store durability", store_durability},
      {"end-to-end latency", end_to_end_latency},
      {"alarm loop", alarm_loop},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    failed += !outcome.pass;
    std::cout << (outcome.pass ? "PASS " : "FAIL ") << name << ": " << outcome.detail << std::endl;
  }
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << criteria.size() - failed << '/' << criteria.size() << std::endl;
  return failed ? 1 : 0;
}
