// Copyright 2026 The DiscoBox Engine Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "core/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace discobox {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double ParseDouble(std::string_view key, std::string_view value) {
  const std::string text(value);
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v)) {
    Fail(ErrorCode::kParseError, std::string(key) + ": not a number: " + text);
  }
  return v;
}

template <typename Int>
Int ParseInt(std::string_view key, std::string_view value) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    Fail(ErrorCode::kParseError, std::string(key) + ": not an integer: " + std::string(value));
  }
  return v;
}

bool ParseBool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  Fail(ErrorCode::kParseError, std::string(key) + ": not a boolean: " + std::string(value));
}

std::string FormatDouble(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

const std::vector<std::string>& RunConfig::Keys() {
  static const std::vector<std::string> keys = {
      "w1", "w2", "zeta", "gamma", "mf_iters", "mf_tol", "mode",
      "sinkhorn_eps", "sinkhorn_t_max", "sinkhorn_tol", "sinkhorn_stabilize",
      "icm_iters", "roi_size", "alpha_mil", "alpha_con", "alpha_nce", "tau",
      "seed", "mil_variant", "nce_foreground_only", "threads"};
  return keys;
}

void RunConfig::Set(std::string_view key, std::string_view raw) {
  const std::string_view value = Trim(raw);
  if (key == "w1") {
    teacher.w1 = ParseDouble(key, value);
  } else if (key == "w2") {
    teacher.w2 = ParseDouble(key, value);
  } else if (key == "zeta") {
    teacher.zeta = ParseDouble(key, value);
  } else if (key == "gamma") {
    teacher.gamma = ParseDouble(key, value);
  } else if (key == "mf_iters") {
    teacher.mf_iters = ParseInt<int>(key, value);
  } else if (key == "mf_tol") {
    teacher.mf_tol = ParseDouble(key, value);
  } else if (key == "mode") {
    if (value == "literal") {
      teacher.mode = crf::MeanFieldMode::kLiteral;
    } else if (value == "two_channel") {
      teacher.mode = crf::MeanFieldMode::kTwoChannel;
    } else {
      Fail(ErrorCode::kParseError, "mode must be literal or two_channel");
    }
  } else if (key == "sinkhorn_eps") {
    sinkhorn.epsilon = ParseDouble(key, value);
  } else if (key == "sinkhorn_t_max") {
    sinkhorn.t_max = ParseInt<int>(key, value);
  } else if (key == "sinkhorn_tol") {
    sinkhorn.tol = ParseDouble(key, value);
  } else if (key == "sinkhorn_stabilize") {
    sinkhorn.stabilization =
        ParseBool(key, value) ? ot::Stabilization::kAuto : ot::Stabilization::kNone;
  } else if (key == "icm_iters") {
    icm_iters = ParseInt<int>(key, value);
  } else if (key == "roi_size") {
    roi_size = ParseInt<int>(key, value);
  } else if (key == "alpha_mil") {
    weights.alpha_mil = ParseDouble(key, value);
  } else if (key == "alpha_con") {
    weights.alpha_con = ParseDouble(key, value);
  } else if (key == "alpha_nce") {
    weights.alpha_nce = ParseDouble(key, value);
  } else if (key == "tau") {
    tau = ParseDouble(key, value);
  } else if (key == "seed") {
    seed = ParseInt<std::uint64_t>(key, value);
  } else if (key == "mil_variant") {
    if (value == "bce") {
      mil_variant = MilVariant::kBce;
    } else if (value == "dice") {
      mil_variant = MilVariant::kDice;
    } else {
      Fail(ErrorCode::kParseError, "mil_variant must be bce or dice");
    }
  } else if (key == "nce_foreground_only") {
    nce_foreground_only = ParseBool(key, value);
  } else if (key == "threads") {
    threads = ParseInt<int>(key, value);
  } else {
    Fail(ErrorCode::kUnknownConfigKey, "unknown config key '" + std::string(key) + "'");
  }
}

void RunConfig::LoadText(std::string_view text) {
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      Fail(ErrorCode::kParseError, "config line " + std::to_string(line_no) + ": expected key=value");
    }
    Set(Trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

void RunConfig::LoadFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIoFailure, "cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  LoadText(buffer.str());
}

void RunConfig::Validate() const {
  auto check = [](bool ok, const char* what) {
    if (!ok) Fail(ErrorCode::kInvalidArgument, what);
  };
  check(teacher.w1 >= 0, "w1 must be non-negative");
  check(teacher.w2 >= 0, "w2 must be non-negative");
  check(teacher.zeta > 0, "zeta must be positive");
  check(teacher.gamma > 0, "gamma must be positive");
  check(teacher.mf_iters >= 0, "mf_iters must be non-negative");
  check(teacher.mf_tol >= 0, "mf_tol must be non-negative");
  check(sinkhorn.epsilon > 0, "sinkhorn_eps must be positive");
  check(sinkhorn.t_max >= 1, "sinkhorn_t_max must be at least 1");
  check(sinkhorn.tol > 0, "sinkhorn_tol must be positive");
  check(icm_iters >= 0, "icm_iters must be non-negative");
  check(roi_size >= 1, "roi_size must be positive");
  check(weights.alpha_mil >= 0 && weights.alpha_con >= 0 && weights.alpha_nce >= 0,
        "loss weights must be non-negative");
  check(tau > 0, "tau must be positive");
  check(threads >= 1, "threads must be at least 1");
}

std::string RunConfig::ToText() const {
  std::ostringstream out;
  out << "w1 = " << FormatDouble(teacher.w1) << "\n"
      << "w2 = " << FormatDouble(teacher.w2) << "\n"
      << "zeta = " << FormatDouble(teacher.zeta) << "\n"
      << "gamma = " << FormatDouble(teacher.gamma) << "\n"
      << "mf_iters = " << teacher.mf_iters << "\n"
      << "mf_tol = " << FormatDouble(teacher.mf_tol) << "\n"
      << "mode = " << (teacher.mode == crf::MeanFieldMode::kLiteral ? "literal" : "two_channel") << "\n"
      << "sinkhorn_eps = " << FormatDouble(sinkhorn.epsilon) << "\n"
      << "sinkhorn_t_max = " << sinkhorn.t_max << "\n"
      << "sinkhorn_tol = " << FormatDouble(sinkhorn.tol) << "\n"
      << "sinkhorn_stabilize = "
      << (sinkhorn.stabilization == ot::Stabilization::kAuto ? "true" : "false") << "\n"
      << "icm_iters = " << icm_iters << "\n"
      << "roi_size = " << roi_size << "\n"
      << "alpha_mil = " << FormatDouble(weights.alpha_mil) << "\n"
      << "alpha_con = " << FormatDouble(weights.alpha_con) << "\n"
      << "alpha_nce = " << FormatDouble(weights.alpha_nce) << "\n"
      << "tau = " << FormatDouble(tau) << "\n"
      << "seed = " << seed << "\n"
      << "mil_variant = " << (mil_variant == MilVariant::kBce ? "bce" : "dice") << "\n"
      << "nce_foreground_only = " << (nce_foreground_only ? "true" : "false") << "\n"
      << "threads = " << threads << "\n";
  return out.str();
}

}  // namespace discobox
