// smartbag: dataset generation, training, evaluation and the service processes.
// Exit status: 0 success, 1 operational failure, 2 usage error.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stop_token>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "smartbag/alerts/alarm.hpp"
#include "smartbag/alerts/config.hpp"
#include "smartbag/alerts/service.hpp"
#include "smartbag/alerts/sinks.hpp"
#include "smartbag/data/dataset.hpp"
#include "smartbag/gateway/gateway.hpp"
#include "smartbag/gateway/source.hpp"
#include "smartbag/nn/model_io.hpp"
#include "smartbag/store/client.hpp"
#include "smartbag/store/server.hpp"

namespace {

using namespace smartbag;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

/// Raised inside a command for a flag combination CLI11 cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Blocks SIGINT/SIGTERM and turns the first one into a stop request.
// SIGUSR1 releases the waiter thread on exit.
class SignalStop {
 public:
  SignalStop() {
    sigemptyset(&set_);
    sigaddset(&set_, SIGINT);
    sigaddset(&set_, SIGTERM);
    sigaddset(&set_, SIGUSR1);
    pthread_sigmask(SIG_BLOCK, &set_, nullptr);
    waiter_ = std::thread([this] {
      int sig = 0;
      sigwait(&set_, &sig);
      if (sig == SIGUSR1) return;
      spdlog::info("received signal {}, stopping", sig);
      source_.request_stop();
    });
  }
  ~SignalStop() {
    pthread_kill(waiter_.native_handle(), SIGUSR1);
    waiter_.join();
  }
  std::stop_source& source() { return source_; }
  std::stop_token token() const { return source_.get_token(); }

 private:
  sigset_t set_;
  std::stop_source source_;
  std::thread waiter_;
};

std::unique_ptr<gateway::Clock> make_clock(double speed) {
  if (speed == 1.0) return std::make_unique<gateway::SystemClock>();
  return std::make_unique<gateway::ScaledClock>(speed);
}

void print_confusion(std::ostream& out, const nn::ConfusionMatrix& cm, const data::ClassVocabulary& vocab) {
  std::size_t width = 9;
  for (const auto& n : vocab.names()) width = std::max(width, n.size() + 1);
  out << std::setw(static_cast<int>(width)) << "true\\pred";
  for (const auto& n : vocab.names()) out << std::setw(static_cast<int>(width)) << n;
  out << '\n';
  for (Eigen::Index r = 0; r < cm.rows(); ++r) {
    out << std::setw(static_cast<int>(width)) << vocab.name(static_cast<std::size_t>(r));
    for (Eigen::Index c = 0; c < cm.cols(); ++c) out << std::setw(static_cast<int>(width)) << cm(r, c);
    out << '\n';
  }
}

void print_evaluation(std::ostream& out, const std::string& label, const nn::Evaluation& ev,
                      const data::ClassVocabulary& vocab) {
  out << std::fixed << std::setprecision(4);
  out << label << " accuracy: " << ev.accuracy << '\n';
  const auto recall = ev.recall();
  out << label << " recall:";
  for (std::size_t k = 0; k < recall.size(); ++k) out << ' ' << vocab.name(k) << '=' << recall[k];
  out << '\n';
  print_confusion(out, ev.confusion, vocab);
  out << std::defaultfloat;
}

// ---- gen --------------------------------------------------------------------

struct GenArgs {
  std::size_t n = data::kDefaultRowCount;
  std::uint64_t seed = 42;
  std::string out;
};

int cmd_gen(const GenArgs& a) {
  auto profiles = data::default_profiles();
  auto ds = data::generate(profiles, a.n, a.seed);
  if (a.out.empty() || a.out == "-") {
    data::save_csv(ds, std::cout);
  } else {
    data::save_csv_file(ds, a.out);
    std::cerr << "wrote " << ds.size() << " rows to " << a.out << '\n';
  }
  return kOk;
}

// ---- train / eval -----------------------------------------------------------

struct TrainArgs {
  std::string data;
  std::size_t epochs = 10;
  std::size_t batch = 128;
  double lr = 1e-3;
  double lambda = 0.0;
  double split = 0.9;
  std::uint64_t seed = 42;
  std::string out = "model.bagm";
  std::vector<std::size_t> layers;
};

int cmd_train(const TrainArgs& a) {
  auto ds = data::load_csv_file(a.data);
  if (ds.empty()) {
    std::cerr << "error: " << a.data << " has no rows\n";
    return kFailure;
  }
  auto parts = data::split(ds, a.split, a.seed);

  nn::ModelSpec spec = a.layers.empty() ? nn::ModelSpec::default_spec() : nn::ModelSpec{a.layers};
  spec.validate();
  if (spec.input_width() != ds.feature_count() || spec.output_width() != ds.vocabulary().size())
    throw UsageError("--layers must start with the feature count and end with the class count");

  nn::Hyperparams hyper;
  hyper.learning_rate = a.lr;
  hyper.batch_size = a.batch;
  hyper.epochs = a.epochs;
  hyper.lambda = a.lambda;
  hyper.seed = a.seed;
  hyper.validate();

  auto result = nn::train(parts.train, spec, hyper, parts.test.empty() ? nullptr : &parts.test);
  auto bytes = nn::export_model(result.model, spec, ds.vocabulary());
  nn::save_model_file(a.out, bytes);

  // Metrics come from the stored single-precision model so `eval` reproduces them.
  auto packaged = nn::import_model(bytes);
  std::cout << "train rows: " << parts.train.size() << ", test rows: " << parts.test.size() << '\n';
  std::cout << "epoch loss:";
  for (double l : result.report.epoch_loss) std::cout << ' ' << std::setprecision(6) << l;
  std::cout << '\n';
  print_evaluation(std::cout, "train", nn::evaluate(packaged.params, parts.train), packaged.vocabulary);
  if (!parts.test.empty())
    print_evaluation(std::cout, "test", nn::evaluate(packaged.params, parts.test), packaged.vocabulary);
  std::cout << "model written to " << a.out << " (" << bytes.size() << " bytes)\n";
  return kOk;
}

struct EvalArgs {
  std::string model;
  std::string data;
  std::optional<double> split;
  std::uint64_t seed = 42;
};

int cmd_eval(const EvalArgs& a) {
  auto packaged = nn::load_model_file(a.model);
  auto ds = data::load_csv_file(a.data, packaged.vocabulary);
  if (ds.empty()) {
    std::cerr << "error: " << a.data << " has no rows\n";
    return kFailure;
  }
  std::string label = "all";
  if (a.split) {
    auto parts = data::split(ds, *a.split, a.seed);
    ds = std::move(parts.test);
    label = "test";
    if (ds.empty()) {
      std::cerr << "error: the test partition is empty\n";
      return kFailure;
    }
  }
  std::cout << label << " rows: " << ds.size() << '\n';
  print_evaluation(std::cout, label, nn::evaluate(packaged.params, ds), packaged.vocabulary);
  return kOk;
}

// ---- store ------------------------------------------------------------------

struct StoreArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string log = "store.log";
  std::string token;
  bool no_sync = false;
  bool memory = false;
};

int cmd_store(const StoreArgs& a) {
  SignalStop signals;
  store::StoreOptions options;
  options.log_path = a.memory ? "" : a.log;
  options.sync = !a.no_sync;
  store::DocumentStore db(options);
  const auto& rec = db.recovery();
  if (rec.truncated_tail || rec.corrupt)
    spdlog::warn("store: recovered {} records; discarded tail{}", rec.records,
                 rec.corrupt ? " (corrupt, saved to .corrupt)" : "");

  store::StoreServer server(db, {a.host, a.port, a.token});
  if (!server.bind()) {
    std::cerr << "error: cannot bind " << a.host << ':' << a.port << " (port in use?)\n";
    return kFailure;
  }
  std::cout << "listening on " << a.host << ':' << server.port() << std::endl;
  std::stop_callback on_stop(signals.token(), [&] { server.stop(); });
  server.serve();
  return kOk;
}

// ---- gateway ----------------------------------------------------------------

struct GatewayArgs {
  std::string store_url = "http://127.0.0.1:8080";
  std::string token;
  std::string device;
  std::int64_t period = 2000;
  std::size_t capacity = 1024;
  std::string trace;
  bool stdin_source = false;
  bool simulate = false;
  std::int64_t interval = 1000;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> count;
  double speed = 1.0;
  std::string notify_log;
  bool exit_when_drained = false;
};

int cmd_gateway(const GatewayArgs& a) {
  const int sources = int(!a.trace.empty()) + int(a.stdin_source) + int(a.simulate);
  if (sources != 1) throw UsageError("choose exactly one of --trace, --stdin, --simulate");

  SignalStop signals;
  auto clock = make_clock(a.speed);
  store::HttpStoreClient client(a.store_url, a.token);

  std::unique_ptr<alerts::LogFileSink> notify;
  if (!a.notify_log.empty()) notify = std::make_unique<alerts::LogFileSink>(a.notify_log);

  gateway::GatewayConfig config{a.device, a.period, a.capacity, true};
  config.validate();
  gateway::GatewayCore core(config, client, [&](const gateway::AlarmNotice& n) {
    if (notify) notify->deliver(alerts::alarm_triggered_event(n.device_id, n.issued_ts, n.acked_ts));
  });

  std::unique_ptr<gateway::FrameSource> source;
  if (!a.trace.empty()) {
    source = std::make_unique<gateway::LineSource>(gateway::LineSource::open_file(a.trace, clock.get()));
  } else if (a.stdin_source) {
    source = std::make_unique<gateway::LineSource>(0);
  } else {
    gateway::SimulatorOptions sim;
    sim.device_id = a.device.empty() ? "BAG1" : a.device;
    sim.seed = a.seed;
    sim.interval_ms = a.interval;
    source = std::make_unique<gateway::SimulatorSource>(gateway::FrameSimulator(sim), *clock, a.interval, a.count);
  }

  gateway::RunOptions run;
  run.exit_when_drained = a.exit_when_drained;
  gateway::run_gateway(core, *source, *clock, signals.token(), run);
  const auto s = core.stats();
  std::cout << "received " << s.received << ", malformed " << s.malformed << ", dropped " << s.dropped
            << ", history " << s.history_pushes << ", latest " << s.latest_pushes << ", buffered " << s.buffered
            << ", alarms " << s.alarms << std::endl;
  return kOk;
}

// ---- alerts -----------------------------------------------------------------

struct AlertsArgs {
  std::string config;
  std::optional<std::string> store_url, model, notify_log, cursor, webhook, devices, token;
  std::optional<std::int64_t> poll;
  double speed = 1.0;
  bool once = false;
};

int cmd_alerts(const AlertsArgs& a) {
  alerts::AlertServiceConfig config;
  if (!a.config.empty()) {
    std::ifstream in(a.config);
    if (!in) throw alerts::ConfigError("cannot open config " + a.config);
    alerts::apply_config(config, alerts::parse_key_values(in));
  }
  std::map<std::string, std::string> overrides;
  auto put = [&](const char* key, const auto& value) {
    if (value) {
      std::ostringstream s;
      s << *value;
      overrides[key] = s.str();
    }
  };
  put("store_url", a.store_url);
  put("model", a.model);
  put("notify_log", a.notify_log);
  put("cursor", a.cursor);
  put("webhook", a.webhook);
  put("devices", a.devices);
  put("token", a.token);
  put("poll_interval_ms", a.poll);
  alerts::apply_config(config, overrides);
  if (config.backoff_max_ms < config.poll_interval_ms) config.backoff_max_ms = config.poll_interval_ms;
  config.validate();

  auto model = nn::load_model_file(config.model_path);
  store::HttpStoreClient client(config.store_url, config.token);
  alerts::LogFileSink log_sink(config.notify_log);
  std::vector<alerts::EventSink*> sinks{&log_sink};
  std::unique_ptr<alerts::WebhookSink> webhook;
  if (!config.webhook_url.empty()) {
    webhook = std::make_unique<alerts::WebhookSink>(alerts::WebhookSink::http_post(config.webhook_url),
                                                    config.webhook_retries);
    sinks.push_back(webhook.get());
  }

  alerts::AlertService service(config, std::move(model), client, sinks);
  auto clock = make_clock(a.speed);
  if (a.once) {
    const auto n = service.poll_once(clock->now_ms());
    std::cout << "processed " << n << ", events " << service.stats().events << std::endl;
    return kOk;
  }
  SignalStop signals;
  alerts::run_alertsvc(service, *clock, signals.token());
  const auto s = service.stats();
  std::cout << "processed " << s.processed << ", malformed " << s.malformed << ", events " << s.events
            << std::endl;
  return kOk;
}

// ---- replay / trace / alarm -------------------------------------------------

struct ReplayArgs {
  std::string trace;
  double speed = 1.0;
};

int cmd_replay(const ReplayArgs& a) {
  SignalStop signals;
  auto clock = make_clock(a.speed);
  auto source = gateway::LineSource::open_file(a.trace, clock.get());
  while (auto line = source.next_line(signals.token())) {
    std::cout << *line;
    if (line->empty() || line->back() != '\n') std::cout << '\n';
    std::cout.flush();
    if (!std::cout) return kFailure;
  }
  return kOk;
}

struct TraceArgs {
  std::size_t n = 20;
  std::uint64_t seed = 1;
  std::string device = "BAG1";
  std::int64_t interval = 1000;
  std::int64_t start_ts = 1700000000000;
  std::optional<std::uint32_t> sos_at;
  std::string out;
};

int cmd_trace(const TraceArgs& a) {
  gateway::SimulatorOptions sim;
  sim.device_id = a.device;
  sim.seed = a.seed;
  sim.interval_ms = a.interval;
  sim.start_ts = a.start_ts;
  sim.sos_at = a.sos_at;
  if (a.sos_at && *a.sos_at >= a.n) throw UsageError("--sos-at must be below --n");
  gateway::FrameSimulator simulator(sim);

  std::ofstream file;
  if (!a.out.empty() && a.out != "-") {
    file.open(a.out, std::ios::trunc);
    if (!file) throw std::runtime_error("cannot write " + a.out);
  }
  std::ostream& out = file.is_open() ? file : std::cout;
  for (std::size_t i = 0; i < a.n; ++i) out << proto::encode_frame(simulator.next());
  return out ? kOk : kFailure;
}

struct AlarmArgs {
  std::string device;
  std::string store_url = "http://127.0.0.1:8080";
  std::string token;
};

int cmd_alarm(const AlarmArgs& a) {
  store::HttpStoreClient client(a.store_url, a.token);
  gateway::SystemClock clock;
  auto cmd = alerts::trigger_alarm(client, a.device, clock.now_ms());
  std::cout << "alarm command for " << cmd.device_id << " issued at " << cmd.issued_ts << " (REQUESTED)"
            << std::endl;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"smartbag: activity-recognition pipeline tools and services"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error, off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic labeled dataset as CSV");
  gen_cmd->add_option("--n", gen.n, "Number of rows (>= 5)")->check(CLI::Range(std::size_t{5}, std::size_t{100000000}));
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("--out", gen.out, "Output CSV path (stdout when omitted)");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train the activity classifier and write a model file");
  train_cmd->add_option("--data", train.data, "Training CSV")->required();
  train_cmd->add_option("--epochs", train.epochs, "Training epochs")->check(CLI::PositiveNumber);
  train_cmd->add_option("--batch", train.batch, "Mini-batch size")->check(CLI::PositiveNumber);
  train_cmd->add_option("--lr", train.lr, "Adam learning rate")->check(CLI::PositiveNumber);
  train_cmd->add_option("--lambda", train.lambda, "L2 regularization strength")->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--split", train.split, "Training fraction, in (0, 1)")
      ->check(CLI::Range(1e-9, 1.0 - 1e-9));
  train_cmd->add_option("--seed", train.seed, "Seed for split, initialization and shuffling");
  train_cmd->add_option("--out", train.out, "Model output path");
  train_cmd->add_option("--layers", train.layers, "Layer widths, input to output")->delimiter(',');

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model file on a CSV dataset");
  eval_cmd->add_option("--model", eval.model, "Model file")->required();
  eval_cmd->add_option("--data", eval.data, "CSV dataset")->required();
  eval_cmd->add_option("--split", eval.split, "Evaluate only the test part of this train fraction")
      ->check(CLI::Range(1e-9, 1.0 - 1e-9));
  eval_cmd->add_option("--seed", eval.seed, "Split seed (as given to train)");

  StoreArgs store_args;
  auto* store_cmd = app.add_subcommand("store", "Run the document store REST server");
  store_cmd->add_option("--host", store_args.host, "Bind address");
  store_cmd->add_option("--port", store_args.port, "TCP port (0 picks one)")->check(CLI::Range(0, 65535));
  store_cmd->add_option("--log", store_args.log, "Write-ahead log path");
  store_cmd->add_flag("--memory", store_args.memory, "Keep everything in memory, no log");
  store_cmd->add_flag("--no-sync", store_args.no_sync, "Skip fdatasync after each write");
  store_cmd->add_option("--token", store_args.token, "Require this bearer token");

  GatewayArgs gw;
  auto* gw_cmd = app.add_subcommand("gateway", "Run the gateway: frames in, telemetry to the store");
  gw_cmd->add_option("--store", gw.store_url, "Store base URL");
  gw_cmd->add_option("--token", gw.token, "Store bearer token");
  gw_cmd->add_option("--device", gw.device, "Device id (default: first frame's)");
  gw_cmd->add_option("--period", gw.period, "Push period in ms")->check(CLI::PositiveNumber);
  gw_cmd->add_option("--capacity", gw.capacity, "Offline buffer capacity")->check(CLI::PositiveNumber);
  gw_cmd->add_option("--trace", gw.trace, "Replay frames from this file, paced by frame ts");
  gw_cmd->add_flag("--stdin", gw.stdin_source, "Read frames from standard input");
  gw_cmd->add_flag("--simulate", gw.simulate, "Generate frames from the class profiles");
  gw_cmd->add_option("--interval", gw.interval, "Simulator frame interval in ms")->check(CLI::PositiveNumber);
  gw_cmd->add_option("--seed", gw.seed, "Simulator seed");
  gw_cmd->add_option("--count", gw.count, "Stop the simulator after this many frames");
  gw_cmd->add_option("--speed", gw.speed, "Clock speed-up factor")->check(CLI::PositiveNumber);
  gw_cmd->add_option("--notify-log", gw.notify_log, "Append ALARM_TRIGGERED events to this log");
  gw_cmd->add_flag("--exit-when-drained", gw.exit_when_drained, "Exit once the source ends and all is pushed");

  AlertsArgs al;
  auto* al_cmd = app.add_subcommand("alerts", "Run the alert service");
  al_cmd->add_option("--config", al.config, "Key-value config file");
  al_cmd->add_option("--store", al.store_url, "Store base URL");
  al_cmd->add_option("--token", al.token, "Store bearer token");
  al_cmd->add_option("--model", al.model, "Model file");
  al_cmd->add_option("--notify-log", al.notify_log, "Notification log path");
  al_cmd->add_option("--cursor", al.cursor, "Cursor file path");
  al_cmd->add_option("--webhook", al.webhook, "Webhook URL");
  al_cmd->add_option("--devices", al.devices, "Comma-separated device ids");
  al_cmd->add_option("--poll", al.poll, "Poll interval in ms")->check(CLI::PositiveNumber);
  al_cmd->add_option("--speed", al.speed, "Clock speed-up factor")->check(CLI::PositiveNumber);
  al_cmd->add_flag("--once", al.once, "Poll once and exit");

  ReplayArgs rp;
  auto* rp_cmd = app.add_subcommand("replay", "Stream a frame file to stdout at recorded pace");
  rp_cmd->add_option("--trace", rp.trace, "Frame file")->required();
  rp_cmd->add_option("--speed", rp.speed, "Speed-up factor")->check(CLI::PositiveNumber);

  TraceArgs tr;
  auto* tr_cmd = app.add_subcommand("trace", "Write a simulated frame file");
  tr_cmd->add_option("--n", tr.n, "Number of frames")->check(CLI::PositiveNumber);
  tr_cmd->add_option("--seed", tr.seed, "Simulator seed");
  tr_cmd->add_option("--device", tr.device, "Device id");
  tr_cmd->add_option("--interval", tr.interval, "Frame spacing in ms")->check(CLI::PositiveNumber);
  tr_cmd->add_option("--start-ts", tr.start_ts, "First frame ts (epoch ms)")->check(CLI::NonNegativeNumber);
  tr_cmd->add_option("--sos-at", tr.sos_at, "Only this frame index carries SOS");
  tr_cmd->add_option("--out", tr.out, "Output path (stdout when omitted)");

  AlarmArgs alarm;
  auto* alarm_cmd = app.add_subcommand("alarm", "Ask a bag to sound its find-my-bag alarm");
  alarm_cmd->add_option("device", alarm.device, "Device id")->required();
  alarm_cmd->add_option("--store", alarm.store_url, "Store base URL");
  alarm_cmd->add_option("--token", alarm.token, "Store bearer token");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  auto logger = spdlog::stderr_color_mt("smartbag");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*gen_cmd) return cmd_gen(gen);
    if (*train_cmd) return cmd_train(train);
    if (*eval_cmd) return cmd_eval(eval);
    if (*store_cmd) return cmd_store(store_args);
    if (*gw_cmd) return cmd_gateway(gw);
    if (*al_cmd) return cmd_alerts(al);
    if (*rp_cmd) return cmd_replay(rp);
    if (*tr_cmd) return cmd_trace(tr);
    if (*alarm_cmd) return cmd_alarm(alarm);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const alerts::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
