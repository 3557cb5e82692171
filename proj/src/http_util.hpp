#pragma once

#include <string>
#include <utility>

#include "cneval/error.hpp"

namespace cneval::detail {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // "" or "/prefix" without trailing slash
};

inline SplitUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw InputError("base URL \"" + url + "\" needs an http:// or https:// scheme");
  }
  auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw InputError("base URL \"" + url + "\" has unsupported scheme " + scheme);
  }
  auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  if (path_start == std::string::npos) {
    out.origin = url;
  } else {
    out.origin = url.substr(0, path_start);
    out.path = url.substr(path_start);
    while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  }
  if (out.origin.size() == scheme_end + 3) throw InputError("base URL \"" + url + "\" has no host");
  return out;
}

}  // namespace cneval::detail
