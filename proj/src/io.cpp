#include "binreg/io.hpp"

#include <charconv>
#include <cmath>
#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>

#include "binreg/errors.hpp"
#include "binreg/format.hpp"

namespace binreg {

namespace {

std::string at_line(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_double(std::string_view text, double& value) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  return !text.empty() && res.ec == std::errc{} && res.ptr == text.data() + text.size();
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw IoError(path.string() + ": file not found");
  }
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  return in;
}

}  // namespace

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  out << 'y';
  for (std::size_t j = 1; j <= data.feature_dim(); ++j) out << ",x" << j;
  out << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << data.label(i);
    for (double v : data.features(i)) out << ',' << format_precise(v);
    out << '\n';
  }
}

Dataset read_dataset_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw FormatError(source + ": empty file, expected header y,x1,...");
  ++line_no;
  const auto header = split(line, ',');
  if (header.empty() || header[0] != "y") {
    throw FormatError(at_line(source, line_no) + "header must start with 'y'");
  }
  const std::size_t d = header.size() - 1;
  for (std::size_t j = 1; j <= d; ++j) {
    if (header[j] != "x" + std::to_string(j)) {
      throw FormatError(at_line(source, line_no) + "expected column x" + std::to_string(j) +
                        ", found '" + std::string(header[j]) + "'");
    }
  }

  Dataset data(d);
  std::vector<double> x(d);
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != d + 1) {
      throw FormatError(at_line(source, line_no) + "expected " + std::to_string(d + 1) +
                        " fields, found " + std::to_string(fields.size()));
    }
    int y;
    if (fields[0] == "0") {
      y = 0;
    } else if (fields[0] == "1") {
      y = 1;
    } else {
      throw FormatError(at_line(source, line_no) + "label must be 0 or 1, found '" +
                        std::string(fields[0]) + "'");
    }
    for (std::size_t j = 0; j < d; ++j) {
      if (!parse_double(fields[j + 1], x[j]) || !std::isfinite(x[j])) {
        throw FormatError(at_line(source, line_no) + "bad value '" + std::string(fields[j + 1]) +
                          "' in column x" + std::to_string(j + 1));
      }
    }
    data.add(x, y);
  }
  return data;
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return read_dataset_csv(in, path.string());
}

void save_dataset(const std::filesystem::path& path, const Dataset& data) {
  std::ostringstream out;
  write_dataset_csv(out, data);
  write_text_file(path, out.str());
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(std::ostream& out, const RunManifest& m) {
  out << "[manifest]\n";
  out << "command=" << m.command << '\n';
  out << "seed=" << m.seed << '\n';
  out << "artifact_version=" << m.artifact_version << '\n';
  out << "started_at=" << m.started_at << '\n';
  out << "finished_at=" << m.finished_at << '\n';
  for (const auto& [key, value] : m.config) out << "config." << key << '=' << value << '\n';
}

void write_model(std::ostream& out, const ModelFile& model) {
  out << "link=" << link_name(model.link) << '\n';
  out << "loss=" << model.loss.to_string() << '\n';
  out << "d=" << model.theta.feature_dim() << '\n';
  for (std::size_t j = 0; j < model.theta.size(); ++j) {
    out << "theta_" << j << '=' << format_precise(model.theta[j]) << '\n';
  }
}

ModelFile read_model(std::istream& in, const std::string& source) {
  std::map<std::string, std::pair<std::string, std::size_t>> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (t.front() == '[') break;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError(at_line(source, line_no) + "expected key=value");
    }
    entries[std::string(trim(t.substr(0, eq)))] = {std::string(trim(t.substr(eq + 1))), line_no};
  }

  auto get = [&](const std::string& key) -> const std::pair<std::string, std::size_t>& {
    const auto it = entries.find(key);
    if (it == entries.end()) throw FormatError(source + ": missing key '" + key + "'");
    return it->second;
  };
  auto wrap = [&](std::size_t ln, auto&& f) {
    try {
      return f();
    } catch (const ParameterError& e) {
      throw FormatError(at_line(source, ln) + e.what());
    }
  };

  ModelFile model;
  const auto& link = get("link");
  model.link = wrap(link.second, [&] { return parse_link(link.first); });
  const auto& loss = get("loss");
  model.loss = wrap(loss.second, [&] { return parse_loss_spec(loss.first); });
  const auto& dim = get("d");
  std::size_t d = 0;
  {
    const auto res = std::from_chars(dim.first.data(), dim.first.data() + dim.first.size(), d);
    if (dim.first.empty() || res.ec != std::errc{} || res.ptr != dim.first.data() + dim.first.size()) {
      throw FormatError(at_line(source, dim.second) + "d must be a nonnegative integer");
    }
  }
  std::vector<double> theta(d + 1);
  for (std::size_t j = 0; j <= d; ++j) {
    const auto& entry = get("theta_" + std::to_string(j));
    if (!parse_double(entry.first, theta[j]) || !std::isfinite(theta[j])) {
      throw FormatError(at_line(source, entry.second) + "bad coefficient '" + entry.first + "'");
    }
  }
  model.theta = ParameterVector(std::move(theta));
  return model;
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return read_model(in, path.string());
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path.string() + ": cannot open for writing");
    out << contents;
    out.flush();
    if (!out) throw IoError(path.string() + ": write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError(path.string() + ": cannot replace file");
  }
}

}  // namespace binreg
