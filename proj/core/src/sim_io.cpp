#include "tiltsim/sim_io.hpp"

#include <cstdio>
#include <fstream>

namespace tiltsim {

namespace {

void put(std::string& s, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, ",%.10g", v);
  s += buf;
}

void put(std::string& s, int v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, ",%d", v);
  s += buf;
}

}  // namespace

std::string csv_header() {
  return "t,pos_x,pos_y,pos_z,v_sp_x,v_sp_y,v_sp_z,v_x,v_y,v_z,"
         "roll,pitch,yaw,roll_sp,pitch_sp,yaw_sp,"
         "tilt_1,tilt_2,tilt_3,tilt_4,tilt_cmd_1,tilt_cmd_2,tilt_cmd_3,tilt_cmd_4,"
         "rotor_cmd_1,rotor_cmd_2,rotor_cmd_3,rotor_cmd_4,"
         "aileron_left,aileron_right,elevator,rudder,"
         "res_fx,res_fy,res_fz,res_mx,res_my,res_mz,"
         "thrust_sp,solver_status,solver_iterations,saturated,failure_active,mode";
}

std::string csv_row(const LogRecord& r) {
  std::string s;
  s.reserve(520);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", r.t);
  s += buf;
  for (int i = 0; i < 3; ++i) put(s, r.position[i]);
  for (int i = 0; i < 3; ++i) put(s, r.v_sp[i]);
  for (int i = 0; i < 3; ++i) put(s, r.v[i]);
  for (int i = 0; i < 3; ++i) put(s, r.attitude[i]);
  for (int i = 0; i < 3; ++i) put(s, r.attitude_sp[i]);
  for (int i = 0; i < 4; ++i) put(s, r.tilt[i]);
  for (int i = 0; i < 4; ++i) put(s, r.tilt_cmd[i]);
  for (int i = 0; i < 4; ++i) put(s, r.rotor_cmd[i]);
  for (int i = 0; i < 4; ++i) put(s, r.surfaces[i]);
  for (int i = 0; i < 3; ++i) put(s, r.residual.force[i]);
  for (int i = 0; i < 3; ++i) put(s, r.residual.moment[i]);
  put(s, r.thrust_sp);
  put(s, r.solver_status);
  put(s, r.solver_iterations);
  put(s, r.saturated ? 1 : 0);
  put(s, r.failure_active ? 1 : 0);
  put(s, r.mode);
  return s;
}

bool write_log_csv(const std::string& path,
                   const std::vector<LogRecord>& log) {
  std::ofstream f(path, std::ios::binary);
  if (!f) return false;
  f << csv_header() << '\n';
  for (const LogRecord& r : log) f << csv_row(r) << '\n';
  return static_cast<bool>(f);
}

bool write_metrics(const std::string& path, const Metrics& m) {
  std::ofstream f(path, std::ios::binary);
  if (!f) return false;
  char buf[64];
  auto line = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%s=%.10g\n", key, v);
    f << buf;
  };
  line("rmse_vx", m.rmse_v.x());
  line("rmse_vy", m.rmse_v.y());
  line("rmse_vz", m.rmse_v.z());
  line("max_abs_pitch", m.max_abs_pitch);
  line("max_abs_vz", m.max_abs_vz);
  line("settle_time", m.settle_time);
  line("recovery_time", m.recovery_time);
  line("circle_radius_error", m.circle_radius_error);
  line("circle_speed_rmse", m.circle_speed_rmse);
  line("mean_rotor_cmd", m.mean_rotor_cmd);
  line("min_tilt_cmd", m.min_tilt_cmd);
  line("mean_tilt_last2s", m.mean_tilt_last2s);
  return static_cast<bool>(f);
}

}  // namespace tiltsim
