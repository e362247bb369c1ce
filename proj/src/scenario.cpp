#include "irqsim/scenario.hpp"

#include <cstdint>
#include <set>
#include <utility>

#include "json.hpp"

namespace irqsim {

namespace {

using ojson = nlohmann::ordered_json;

// Tracks which keys a section consumed so anything left over is reported as
// an unknown key with its full path.
class ObjReader {
 public:
  ObjReader(const ojson& o, std::string path) : o_(o), path_(std::move(path)) {
    if (!o.is_object()) throw Error(Errc::bad_value, path_ + " must be an object");
  }

  const ojson* opt(const std::string& key) {
    seen_.insert(key);
    auto it = o_.find(key);
    return it == o_.end() ? nullptr : &it.value();
  }

  const ojson& req(const std::string& key) {
    const ojson* p = opt(key);
    if (!p) throw Error(Errc::bad_value, path_ + " is missing required key \"" + key + "\"");
    return *p;
  }

  void finish() const {
    for (const auto& [k, v] : o_.items())
      if (!seen_.count(k))
        throw Error(Errc::unknown_key, path_ + " has unknown key \"" + k + "\"");
  }

  const std::string& path() const { return path_; }

 private:
  const ojson& o_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string get_string(const ojson& v, const std::string& path) {
  if (!v.is_string()) throw Error(Errc::bad_value, path + " must be a string");
  return v.get<std::string>();
}

bool get_bool(const ojson& v, const std::string& path) {
  if (!v.is_boolean()) throw Error(Errc::bad_value, path + " must be true or false");
  return v.get<bool>();
}

std::uint64_t get_u64(const ojson& v, const std::string& path) {
  if (!v.is_number_unsigned())
    throw Error(Errc::bad_value, path + " must be a non-negative integer");
  return v.get<std::uint64_t>();
}

int get_int(const ojson& v, const std::string& path) {
  if (!v.is_number_integer())
    throw Error(Errc::bad_value, path + " must be an integer");
  return v.get<int>();
}

Duration dur_field(const ojson& v, const std::string& path) {
  if (v.is_number())
    throw Error(Errc::bad_unit,
                path + " must be a string with a unit suffix, e.g. \"250us\"");
  return parse_duration(get_string(v, path));
}

DistributionSpec parse_dist(const ojson& v, const std::string& path) {
  if (v.is_string()) return DistributionSpec::constant(parse_duration(v.get<std::string>()));
  ObjReader r(v, path);
  std::string kind = get_string(r.req("dist"), path + ".dist");
  DistributionSpec spec;
  if (kind == "constant") {
    spec = DistributionSpec::constant(dur_field(r.req("value"), path + ".value"));
  } else if (kind == "uniform") {
    spec = DistributionSpec::uniform(dur_field(r.req("lo"), path + ".lo"),
                                     dur_field(r.req("hi"), path + ".hi"));
  } else if (kind == "shifted_exp") {
    spec = DistributionSpec::shifted_exp(dur_field(r.req("min"), path + ".min"),
                                         dur_field(r.req("mean"), path + ".mean"));
  } else {
    throw Error(Errc::bad_value,
                path + ".dist must be constant, uniform, or shifted_exp");
  }
  r.finish();
  spec.validate();
  return spec;
}

ojson render_dist(const DistributionSpec& d) {
  switch (d.kind) {
    case DistributionSpec::Kind::constant:
      return ojson(format_duration(d.a));
    case DistributionSpec::Kind::uniform:
      return ojson{{"dist", "uniform"}, {"lo", format_duration(d.a)}, {"hi", format_duration(d.b)}};
    case DistributionSpec::Kind::shifted_exp:
      return ojson{{"dist", "shifted_exp"},
                   {"min", format_duration(d.a)},
                   {"mean", format_duration(d.b)}};
  }
  return ojson();
}

Subsystem parse_subsystem(const std::string& name, const std::string& path) {
  for (Subsystem s : {Subsystem::rt_core, Subsystem::net_driver,
                      Subsystem::serial_driver, Subsystem::kernel_sync})
    if (name == subsystem_name(s)) return s;
  throw Error(Errc::bad_value, path + " has unknown subsystem \"" + name + "\"");
}

ArchCfg parse_arch(const ojson& v) {
  ArchCfg arch;
  ObjReader r(v, "arch");
  std::string variant = get_string(r.req("variant"), "arch.variant");
  if (variant == "direct") {
    arch.variant = ArchVariant::direct;
  } else if (variant == "virtualized") {
    arch.variant = ArchVariant::virtualized;
  } else {
    throw Error(Errc::bad_value, "arch.variant must be direct or virtualized");
  }

  ObjReader costs(r.req("costs"), "arch.costs");
  arch.isr_entry = parse_dist(costs.req("isr_entry"), "arch.costs.isr_entry");
  if (const ojson* p = costs.opt("timer_isr_body"))
    arch.timer_isr_body = parse_dist(*p, "arch.costs.timer_isr_body");
  arch.decide_cost = dur_field(costs.req("decide_cost"), "arch.costs.decide_cost");
  if (const ojson* p = costs.opt("context")) {
    if (!p->is_object())
      throw Error(Errc::bad_value, "arch.costs.context must be an object");
    for (const auto& [name, dv] : p->items())
      arch.context[name] = parse_dist(dv, "arch.costs.context." + name);
  }
  if (const ojson* p = costs.opt("hard_mask_sections")) {
    if (!p->is_object())
      throw Error(Errc::bad_value, "arch.costs.hard_mask_sections must be an object");
    for (const auto& [name, dv] : p->items())
      arch.hard_mask_sections[parse_subsystem(name, "arch.costs.hard_mask_sections")] =
          parse_dist(dv, "arch.costs.hard_mask_sections." + name);
  }
  if (const ojson* p = costs.opt("mask_section_cap"))
    arch.mask_section_cap = dur_field(*p, "arch.costs.mask_section_cap");
  const ojson* soft = costs.opt("soft_toggle");
  const ojson* pend = costs.opt("pending_mgmt");
  if (arch.variant == ArchVariant::direct && (soft || pend))
    throw Error(Errc::bad_value,
                "arch.costs.soft_toggle and pending_mgmt require the virtualized variant");
  if (soft) arch.soft_toggle = dur_field(*soft, "arch.costs.soft_toggle");
  if (pend) arch.pending_mgmt = dur_field(*pend, "arch.costs.pending_mgmt");
  costs.finish();
  r.finish();
  return arch;
}

NetStormSpec parse_net_storm(const ojson& v) {
  NetStormSpec net;
  ObjReader r(v, "load.net_storm");
  net.enabled = get_bool(r.req("enabled"), "load.net_storm.enabled");
  if (const ojson* p = r.opt("inter_arrival"))
    net.inter_arrival = parse_dist(*p, "load.net_storm.inter_arrival");
  if (const ojson* p = r.opt("isr_body"))
    net.isr_body = parse_dist(*p, "load.net_storm.isr_body");
  if (const ojson* p = r.opt("kernel_work"))
    net.kernel_work = parse_dist(*p, "load.net_storm.kernel_work");
  if (const ojson* p = r.opt("mask_section"))
    net.mask_section = parse_dist(*p, "load.net_storm.mask_section");
  if (const ojson* p = r.opt("hw_priority"))
    net.hw_priority = get_int(*p, "load.net_storm.hw_priority");
  if (const ojson* p = r.opt("worker_priority"))
    net.worker_priority = get_int(*p, "load.net_storm.worker_priority");
  r.finish();
  return net;
}

SerialCopierSpec parse_serial_copier(const ojson& v) {
  SerialCopierSpec ser;
  ObjReader r(v, "load.serial_copier");
  ser.enabled = get_bool(r.req("enabled"), "load.serial_copier.enabled");
  if (const ojson* p = r.opt("priority"))
    ser.priority = get_int(*p, "load.serial_copier.priority");
  if (const ojson* p = r.opt("chunk_work"))
    ser.chunk_work = parse_dist(*p, "load.serial_copier.chunk_work");
  if (const ojson* p = r.opt("serial_irq"))
    ser.serial_irq = parse_dist(*p, "load.serial_copier.serial_irq");
  if (const ojson* p = r.opt("mask_section"))
    ser.mask_section = parse_dist(*p, "load.serial_copier.mask_section");
  if (const ojson* p = r.opt("device_delay"))
    ser.device_delay = parse_dist(*p, "load.serial_copier.device_delay");
  if (const ojson* p = r.opt("hw_priority"))
    ser.hw_priority = get_int(*p, "load.serial_copier.hw_priority");
  r.finish();
  return ser;
}

MeasureConfig parse_measure(const ojson& v) {
  MeasureConfig m;
  ObjReader r(v, "measure");
  m.interrupt_count = get_u64(r.req("interrupt_count"), "measure.interrupt_count");
  std::uint64_t rate = get_u64(r.req("rate_hz"), "measure.rate_hz");
  if (rate == 0 || rate > 0xffffffffull)
    throw Error(Errc::bad_value, "measure.rate_hz is out of range");
  m.rate_hz = static_cast<std::uint32_t>(rate);
  m.seed = get_u64(r.req("seed"), "measure.seed");
  if (const ojson* p = r.opt("warmup_discard")) {
    std::uint64_t w = get_u64(*p, "measure.warmup_discard");
    if (w > 0xffffffffull)
      throw Error(Errc::bad_value, "measure.warmup_discard is out of range");
    m.warmup_discard = static_cast<std::uint32_t>(w);
  }
  if (const ojson* p = r.opt("timer_hw_priority"))
    m.timer_hw_priority = get_int(*p, "measure.timer_hw_priority");
  r.finish();
  return m;
}

ReportCfg parse_report(const ojson& v) {
  ReportCfg rep;
  ObjReader r(v, "report");
  if (const ojson* p = r.opt("bucket_width")) {
    rep.bucket_width = dur_field(*p, "report.bucket_width");
    if (rep.bucket_width.ns == 0)
      throw Error(Errc::bad_value, "report.bucket_width must be positive");
  }
  r.finish();
  return rep;
}

}  // namespace

Duration parse_duration(const std::string& text) {
  std::size_t i = 0;
  if (i < text.size() && text[i] == '-')
    throw Error(Errc::bad_value, "duration \"" + text + "\" must not be negative");
  std::uint64_t whole = 0;
  std::size_t digits = 0;
  while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
    if (whole > (0xffffffffffffffffull - 9) / 10)
      throw Error(Errc::bad_value, "duration \"" + text + "\" is too large");
    whole = whole * 10 + static_cast<std::uint64_t>(text[i] - '0');
    i++;
    digits++;
  }
  std::string frac;
  if (i < text.size() && text[i] == '.') {
    i++;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
      frac.push_back(text[i]);
      i++;
    }
    if (frac.empty())
      throw Error(Errc::bad_value, "duration \"" + text + "\" has an empty fraction");
  }
  if (digits == 0)
    throw Error(Errc::bad_value, "duration \"" + text + "\" has no digits");
  std::string suffix = text.substr(i);
  unsigned pow10 = 0;
  if (suffix == "ns") {
    pow10 = 0;
  } else if (suffix == "us") {
    pow10 = 3;
  } else if (suffix == "ms") {
    pow10 = 6;
  } else if (suffix.empty()) {
    throw Error(Errc::bad_unit, "duration \"" + text + "\" is missing a unit suffix (ns, us, ms)");
  } else {
    throw Error(Errc::bad_unit, "duration \"" + text + "\" has unknown unit \"" + suffix + "\"");
  }
  if (frac.size() > pow10)
    throw Error(Errc::bad_value,
                "duration \"" + text + "\" is finer than a whole nanosecond");
  std::uint64_t scale = 1;
  for (unsigned k = 0; k < pow10; ++k) scale *= 10;
  std::uint64_t ns = 0;
  if (__builtin_mul_overflow(whole, scale, &ns))
    throw Error(Errc::bad_value, "duration \"" + text + "\" is too large");
  std::uint64_t frac_ns = 0;
  for (char c : frac) frac_ns = frac_ns * 10 + static_cast<std::uint64_t>(c - '0');
  for (std::size_t k = frac.size(); k < pow10; ++k) frac_ns *= 10;
  if (__builtin_add_overflow(ns, frac_ns, &ns))
    throw Error(Errc::bad_value, "duration \"" + text + "\" is too large");
  return Duration{ns};
}

std::string format_duration(Duration d) {
  if (d.ns != 0 && d.ns % 1000000 == 0) return std::to_string(d.ns / 1000000) + "ms";
  if (d.ns != 0 && d.ns % 1000 == 0) return std::to_string(d.ns / 1000) + "us";
  return std::to_string(d.ns) + "ns";
}

Scenario parse_scenario(const std::string& text) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::parse_error, e.what());
  }
  ObjReader r(doc, "scenario");
  Scenario sc;
  if (const ojson* p = r.opt("name")) sc.name = get_string(*p, "name");
  sc.arch = parse_arch(r.req("arch"));
  if (const ojson* p = r.opt("load")) {
    ObjReader lr(*p, "load");
    if (const ojson* n = lr.opt("net_storm")) sc.load.net_storm = parse_net_storm(*n);
    if (const ojson* s = lr.opt("serial_copier"))
      sc.load.serial_copier = parse_serial_copier(*s);
    lr.finish();
  }
  sc.measure = parse_measure(r.req("measure"));
  if (const ojson* p = r.opt("report")) sc.report = parse_report(*p);
  r.finish();
  validate_scenario(sc);
  return sc;
}

std::string render_scenario(const Scenario& sc) {
  ojson doc;
  doc["name"] = sc.name;

  ojson costs;
  costs["isr_entry"] = render_dist(sc.arch.isr_entry);
  costs["timer_isr_body"] = render_dist(sc.arch.timer_isr_body);
  costs["decide_cost"] = format_duration(sc.arch.decide_cost);
  if (!sc.arch.context.empty()) {
    ojson ctx;
    for (const auto& [name, d] : sc.arch.context) ctx[name] = render_dist(d);
    costs["context"] = ctx;
  }
  if (!sc.arch.hard_mask_sections.empty()) {
    ojson sections;
    for (const auto& [sys, d] : sc.arch.hard_mask_sections)
      sections[subsystem_name(sys)] = render_dist(d);
    costs["hard_mask_sections"] = sections;
  }
  if (sc.arch.mask_section_cap)
    costs["mask_section_cap"] = format_duration(*sc.arch.mask_section_cap);
  if (sc.arch.variant == ArchVariant::virtualized) {
    costs["soft_toggle"] = format_duration(sc.arch.soft_toggle);
    costs["pending_mgmt"] = format_duration(sc.arch.pending_mgmt);
  }
  doc["arch"] = ojson{{"variant", arch_name(sc.arch.variant)}, {"costs", costs}};

  ojson net;
  net["enabled"] = sc.load.net_storm.enabled;
  net["inter_arrival"] = render_dist(sc.load.net_storm.inter_arrival);
  net["isr_body"] = render_dist(sc.load.net_storm.isr_body);
  net["kernel_work"] = render_dist(sc.load.net_storm.kernel_work);
  net["mask_section"] = render_dist(sc.load.net_storm.mask_section);
  net["hw_priority"] = sc.load.net_storm.hw_priority;
  net["worker_priority"] = sc.load.net_storm.worker_priority;
  ojson ser;
  ser["enabled"] = sc.load.serial_copier.enabled;
  ser["priority"] = sc.load.serial_copier.priority;
  ser["chunk_work"] = render_dist(sc.load.serial_copier.chunk_work);
  ser["serial_irq"] = render_dist(sc.load.serial_copier.serial_irq);
  ser["mask_section"] = render_dist(sc.load.serial_copier.mask_section);
  ser["device_delay"] = render_dist(sc.load.serial_copier.device_delay);
  ser["hw_priority"] = sc.load.serial_copier.hw_priority;
  doc["load"] = ojson{{"net_storm", net}, {"serial_copier", ser}};

  doc["measure"] = ojson{{"interrupt_count", sc.measure.interrupt_count},
                         {"rate_hz", sc.measure.rate_hz},
                         {"seed", sc.measure.seed},
                         {"warmup_discard", sc.measure.warmup_discard},
                         {"timer_hw_priority", sc.measure.timer_hw_priority}};
  doc["report"] = ojson{{"bucket_width", format_duration(sc.report.bucket_width)}};
  return doc.dump(2) + "\n";
}

}  // namespace irqsim
