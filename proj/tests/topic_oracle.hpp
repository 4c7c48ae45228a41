#pragma once

// Brute-force topic matching reference: filters over at most 3 levels of
// {a, b, c, +, #} are expanded into the explicit set of topics they denote,
// then compared with the matcher on every topic of at most 3 levels.

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "teleop/msgbus/topic.hpp"

namespace oracle {

inline const std::vector<std::string> kSymbols{"a", "b", "c"};
constexpr int kMaxLevels = 3;

inline std::string join(const std::vector<std::string>& levels) {
  std::string out;
  for (std::size_t i = 0; i < levels.size(); ++i) out += (i ? "/" : "") + levels[i];
  return out;
}

// Every sequence of 1..max levels over kSymbols.
inline std::vector<std::vector<std::string>> all_sequences(int min_len, int max_len) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> cur;
  std::function<void()> rec = [&] {
    if (int(cur.size()) >= min_len) out.push_back(cur);
    if (int(cur.size()) == max_len) return;
    for (const auto& s : kSymbols) {
      cur.push_back(s);
      rec();
      cur.pop_back();
    }
  };
  rec();
  return out;
}

// The oracle expands a filter into the explicit set of topics it denotes
// within the bounded universe, without ever calling the matcher.
inline std::set<std::string> expand(const std::vector<std::string>& filter) {
  std::set<std::vector<std::string>> partial{{}};
  for (std::size_t i = 0; i < filter.size(); ++i) {
    std::set<std::vector<std::string>> next;
    for (const auto& prefix : partial) {
      if (filter[i] == "#") {
        // zero or more trailing levels; zero only if the prefix is a topic on its own
        if (!prefix.empty()) next.insert(prefix);
        for (const auto& tail : all_sequences(1, kMaxLevels - int(prefix.size()))) {
          auto t = prefix;
          t.insert(t.end(), tail.begin(), tail.end());
          next.insert(t);
        }
      } else if (filter[i] == "+") {
        for (const auto& s : kSymbols) {
          auto t = prefix;
          t.push_back(s);
          next.insert(t);
        }
      } else {
        auto t = prefix;
        t.push_back(filter[i]);
        next.insert(t);
      }
    }
    partial = std::move(next);
  }
  std::set<std::string> out;
  for (const auto& t : partial)
    if (!t.empty() && int(t.size()) <= kMaxLevels) out.insert(join(t));
  return out;
}

inline bool well_formed(const std::vector<std::string>& f) {
  for (std::size_t i = 0; i + 1 < f.size(); ++i)
    if (f[i] == "#") return false;
  return true;
}


struct TopicReport {
  int checked = 0;
  int malformed_rejected = 0;
  std::vector<std::string> mismatches;
};

inline TopicReport check_topic_matcher() {
  using teleop::msgbus::TopicFilter;
  TopicReport rep;
  const auto topics = all_sequences(1, kMaxLevels);
  std::vector<std::string> filter_symbols = kSymbols;
  filter_symbols.push_back("+");
  filter_symbols.push_back("#");

  std::vector<std::vector<std::string>> filters;
  std::vector<std::string> cur;
  std::function<void()> rec = [&] {
    if (!cur.empty()) filters.push_back(cur);
    if (int(cur.size()) == kMaxLevels) return;
    for (const auto& s : filter_symbols) {
      cur.push_back(s);
      rec();
      cur.pop_back();
    }
  };
  rec();

  for (const auto& f : filters) {
    if (!well_formed(f)) {
      try {
        TopicFilter::parse(join(f));
        rep.mismatches.push_back("accepted malformed filter " + join(f));
      } catch (const std::exception&) {
        ++rep.malformed_rejected;
      }
      continue;
    }
    const auto filter = TopicFilter::parse(join(f));
    const auto expected = expand(f);
    for (const auto& t : topics) {
      const std::string topic = join(t);
      if (teleop::msgbus::match_topic(filter, topic) != expected.contains(topic)) {
        rep.mismatches.push_back(join(f) + " vs " + topic);
      }
      ++rep.checked;
    }
  }
  return rep;
}

}  // namespace oracle
