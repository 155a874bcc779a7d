#pragma once

#include <json.hpp>
#include <string>
#include <vector>

namespace fdstab {

using OrderedJson = nlohmann::ordered_json;

// One named measurement with the tolerance it was judged against.
struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Machine-readable run report.  Serialization is insertion-ordered and free
// of timestamps, so identical (config, seed) runs produce identical bytes.
struct Report {
  std::string command;
  OrderedJson config = OrderedJson::object();
  std::vector<CheckResult> checks;
  OrderedJson results = OrderedJson::object();

  void add_check(const std::string& name, double value, double tolerance, bool pass);
  // Boolean observation folded into the numeric check layout.
  void add_flag(const std::string& name, bool pass);
  bool all_pass() const;

  OrderedJson to_json() const;
  std::string to_text() const; // pretty-printed JSON with trailing newline
};

// Writes content to path, or to stdout when path is empty or "-".
void write_output(const std::string& path, const std::string& content);

} // namespace fdstab
