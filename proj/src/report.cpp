#include "fdstab/report.hpp"

#include <fstream>
#include <iostream>

#include "fdstab/errors.hpp"

namespace fdstab {

void Report::add_check(const std::string& name, double value, double tolerance,
                       bool pass) {
  checks.push_back({name, value, tolerance, pass});
}

void Report::add_flag(const std::string& name, bool pass) {
  checks.push_back({name, pass ? 1.0 : 0.0, 0.5, pass});
}

bool Report::all_pass() const {
  for (const CheckResult& check : checks) {
    if (!check.pass) {
      return false;
    }
  }
  return true;
}

OrderedJson Report::to_json() const {
  OrderedJson doc = OrderedJson::object();
  doc["schema_version"] = 1;
  doc["tool"] = "fdstab";
  doc["version"] = "0.1.0";
  doc["command"] = command;
  doc["config"] = config;
  OrderedJson list = OrderedJson::array();
  for (const CheckResult& check : checks) {
    OrderedJson entry = OrderedJson::object();
    entry["name"] = check.name;
    entry["value"] = check.value;
    entry["tolerance"] = check.tolerance;
    entry["verdict"] = check.pass ? "pass" : "fail";
    list.push_back(entry);
  }
  doc["checks"] = list;
  doc["results"] = results;
  doc["verdict"] = all_pass() ? "pass" : "fail";
  return doc;
}

std::string Report::to_text() const { return to_json().dump(2) + "\n"; }

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    raise(Errc::config_error, "cannot open output file " + path);
  }
  out << content;
  if (!out) {
    raise(Errc::config_error, "failed writing output file " + path);
  }
}

} // namespace fdstab
