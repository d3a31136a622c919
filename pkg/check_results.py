#!/usr/bin/env python3
"""檢查實驗帳本中的評估結果"""

import sys

from engine.storage import fetch_evaluations, fetch_summary, init_db, ledger_path

OUTDIR = sys.argv[1] if len(sys.argv) > 1 else "results"
DATABASE = ledger_path(OUTDIR)
init_db(DATABASE)

rows = fetch_evaluations(DATABASE)

# 最近的評估
print("=" * 70)
print("最近的評估結果（最後 10 筆）")
print("=" * 70)

for row in rows[-10:]:
    print(f"\n時間: {row['created_at']}  配置: {row['config_hash']}  seed: {row['seed']}")
    print(f"  方案: {row['scheme']} @ {row['snr_db']:g} dB (β={row['beta']:g})")
    print(f"  平均速率: {row['mean']:.4f} ± {row['std']:.4f} bits")
    print(f"  評估: {row['n_runs']} 次 × {row['n_steps']} 步, CSIT {row['csit_mode']}")
    if row["train_mean"] is not None:
        print(f"  訓練最後平均: {row['train_mean']:.4f}")
    if row["exhaustive_mean"] is not None:
        print(f"  窮舉解碼順序: {row['exhaustive_mean']:.4f}")
    if row["perfect_csit_mean"] is not None:
        print(f"  完美 CSIT: {row['perfect_csit_mean']:.4f}")

# 統計
print("\n" + "=" * 70)
print("各方案統計")
print("=" * 70)

for stats in fetch_summary(DATABASE):
    print(
        f"{stats['scheme']:<16} 筆數 {stats['count']:>4}  "
        f"平均 {stats['avg_rate']:.4f}  最小 {stats['min_rate']:.4f}  最大 {stats['max_rate']:.4f}"
    )
print(f"\n總記錄數: {len(rows)}")
