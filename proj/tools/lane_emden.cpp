// lane-emden: command-line front end.  Each subcommand takes --config FILE
// (a JSON record) and one flag per leaf of its schema, e.g. --R 40 or
// --Q.alpha 3; flags override the file.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "lanemden/harness.hpp"
#include "lanemden/linear_solver.hpp"

namespace h = lanemden::harness;
using h::json;

namespace {

void leaves(const json& j, const std::string& prefix, std::vector<std::pair<std::string, const json*>>& out) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it.value().is_object()) {
      leaves(it.value(), key, out);
    } else {
      out.emplace_back(key, &it.value());
    }
  }
}

// Flag text is read as a JSON literal when it parses as one, else as a string.
json literal(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return text;
  }
}

void assign(json& rec, const std::string& dotted, json value) {
  json* node = &rec;
  std::size_t pos = 0;
  for (;;) {
    const auto dot = dotted.find('.', pos);
    const auto part = dotted.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (dot == std::string::npos) {
      (*node)[part] = std::move(value);
      return;
    }
    node = &(*node)[part];
    pos = dot + 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete Lane-Emden solver"};
  app.require_subcommand(1);

  struct Sub {
    CLI::App* app;
    std::string config_path;
    std::map<std::string, std::string> flags;
    std::map<std::string, bool> switches;
  };
  std::map<std::string, Sub> subs;
  for (const auto& name : h::commands()) {
    auto& s = subs[name];
    s.app = app.add_subcommand(name, "run the " + name + " command");
    s.app->add_option("--config", s.config_path, "JSON config file")->check(CLI::ExistingFile);
    const auto schema = h::defaults(name);
    std::vector<std::pair<std::string, const json*>> keys;
    leaves(schema, "", keys);
    for (const auto& [key, def] : keys) {
      if (def->is_boolean()) {
        s.app->add_flag("--" + key, s.switches[key], "default " + def->dump());
      } else {
        s.app->add_option("--" + key, s.flags[key], "default " + def->dump());
      }
    }
  }

  CLI11_PARSE(app, argc, argv);

  for (auto& [name, s] : subs) {
    if (!s.app->parsed()) continue;
    try {
      json raw = json::object();
      if (!s.config_path.empty()) {
        std::ifstream in(s.config_path);
        try {
          raw = json::parse(in);
        } catch (const json::parse_error& e) {
          throw h::ConfigError(s.config_path + ": " + e.what());
        }
      }
      for (const auto& [key, text] : s.flags) {
        if (s.app->count("--" + key) > 0) assign(raw, key, literal(text));
      }
      for (const auto& [key, on] : s.switches) {
        if (s.app->count("--" + key) > 0) assign(raw, key, on);
      }
      const auto cfg = h::parse_config(name, raw);
      const auto res = h::run(cfg);
      std::cout << res.summary.dump(2) << "\n";
      for (const auto& f : res.files) std::cout << "wrote " << f.string() << "\n";
      if (!res.checks_passed) {
        std::cerr << "checks failed\n";
        return 1;
      }
      return 0;
    } catch (const h::ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    } catch (const lanemden::SolverError& e) {
      std::cerr << "solver error: " << e.what() << "\n";
      return 3;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return 1;
}
