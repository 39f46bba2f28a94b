#include "iacforge/verify/external.hpp"

#include <chrono>
#include <filesystem>
#include <random>

#include "iacforge/util/jsonl.hpp"
#include "iacforge/util/subprocess.hpp"

namespace iacforge::verify {

namespace {

namespace fs = std::filesystem;

struct TempWorkdir {
  fs::path path;
  explicit TempWorkdir(const std::string& config_text) {
    auto base = fs::temp_directory_path();
    std::random_device rd;
    for (int i = 0; i < 64; ++i) {
      auto candidate = base / ("iacforge-" + std::to_string(rd()));
      std::error_code ec;
      if (fs::create_directory(candidate, ec)) {
        path = candidate;
        break;
      }
    }
    if (path.empty()) throw std::runtime_error("cannot create temp workdir");
    util::write_text_file(path / "main.tf", config_text);
  }
  ~TempWorkdir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string resolve_or_throw(const std::string& bin) {
  auto resolved = util::resolve_binary(bin.empty() ? "terraform" : bin);
  if (!resolved) {
    throw BackendUnavailable("terraform binary not found" +
                             (bin.empty() ? std::string() : " at '" + bin + "'"));
  }
  return *resolved;
}

std::string clip(const std::string& s, size_t limit = 4000) {
  if (s.size() <= limit) return s;
  return s.substr(0, limit) + "\n[output truncated]";
}

Diagnostic tool_diag(Stage stage, std::string code, std::string message) {
  Diagnostic d;
  d.stage = stage;
  d.code = std::move(code);
  d.message = std::move(message);
  return d;
}

}  // namespace

VerdictReport external_validate(const std::string& config_text, const ExternalBackend& backend) {
  std::string bin = resolve_or_throw(backend.terraform_bin);
  auto t0 = std::chrono::steady_clock::now();
  TempWorkdir dir(config_text);

  VerdictReport report;
  report.stage = Stage::FV1;
  report.backend = "external";

  util::RunOptions opts;
  opts.workdir = dir.path.string();
  auto result = util::run_command({bin, "validate", "-json", "-no-color"}, opts);

  bool parsed_output = false;
  try {
    auto j = nlohmann::json::parse(result.out);
    parsed_output = true;
    report.passed = j.value("valid", result.exit_code == 0);
    for (const auto& diag : j.value("diagnostics", nlohmann::json::array())) {
      Diagnostic d;
      d.stage = Stage::FV1;
      d.code = "TF_VALIDATE";
      d.severity = diag.value("severity", "error") == "warning" ? Severity::Warning
                                                                : Severity::Error;
      d.message = diag.value("summary", "");
      if (diag.contains("detail") && diag["detail"].is_string() &&
          !diag["detail"].get<std::string>().empty()) {
        d.message += ": " + diag["detail"].get<std::string>();
      }
      if (diag.contains("range")) {
        const auto& r = diag["range"];
        SourceLocation loc;
        loc.file = r.value("filename", "");
        if (r.contains("start")) {
          loc.line = r["start"].value("line", 0);
          loc.col = r["start"].value("column", 0);
        }
        d.location = loc;
      }
      report.diagnostics.push_back(std::move(d));
    }
  } catch (const nlohmann::json::parse_error&) {
    // fall through to raw output mapping
  }

  if (!parsed_output) {
    report.passed = result.ok();
    if (!report.passed) {
      report.diagnostics.push_back(
          tool_diag(Stage::FV1, "TOOL_OUTPUT", clip(result.err.empty() ? result.out : result.err)));
    }
  }

  report.elapsed_secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

VerdictReport external_plan(const std::string& config_text, const ExternalBackend& backend) {
  std::string bin = resolve_or_throw(backend.terraform_bin);
  auto t0 = std::chrono::steady_clock::now();
  TempWorkdir dir(config_text);

  VerdictReport report;
  report.stage = Stage::FV2;
  report.backend = "external";

  auto timeout_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(backend.plan_timeout);

  util::RunOptions opts;
  opts.workdir = dir.path.string();
  opts.timeout = timeout_ms;

  auto init = util::run_command({bin, "init", "-backend=false", "-input=false", "-no-color"}, opts);
  if (init.timed_out) {
    report.diagnostics.push_back(tool_diag(
        Stage::FV2, "TIMEOUT",
        "terraform init did not complete within " +
            std::to_string(backend.plan_timeout.count()) + " seconds"));
  } else if (!init.ok()) {
    report.diagnostics.push_back(
        tool_diag(Stage::FV2, "INIT_FAILED", clip(init.err.empty() ? init.out : init.err)));
  } else {
    auto plan_run =
        util::run_command({bin, "plan", "-input=false", "-no-color", "-lock=false"}, opts);
    if (plan_run.timed_out) {
      report.diagnostics.push_back(tool_diag(
          Stage::FV2, "TIMEOUT",
          "terraform plan did not complete within " +
              std::to_string(backend.plan_timeout.count()) + " seconds"));
    } else if (!plan_run.ok()) {
      report.diagnostics.push_back(tool_diag(
          Stage::FV2, "PLAN_FAILED", clip(plan_run.err.empty() ? plan_run.out : plan_run.err)));
    }
  }

  report.passed = report.diagnostics.empty();
  report.elapsed_secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace iacforge::verify
