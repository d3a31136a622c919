#!/usr/bin/env python3
"""SQLite run ledger kept next to the CSV results."""

import os
import sqlite3
from datetime import datetime, timedelta, timezone

LEDGER_NAME = "results.db"

# 台灣時區 (UTC+8)
TAIWAN_TZ = timezone(timedelta(hours=8))


def now_taiwan():
    """獲取台灣時間"""
    return datetime.now(TAIWAN_TZ)


def ledger_path(outdir):
    return os.path.join(outdir, LEDGER_NAME)


def get_db(database_path):
    """獲取資料庫連接"""
    conn = sqlite3.connect(database_path)
    conn.row_factory = sqlite3.Row
    return conn


def init_db(database_path):
    """初始化資料庫"""
    directory = os.path.dirname(database_path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    conn = get_db(database_path)
    conn.execute(
        """
        CREATE TABLE IF NOT EXISTS evaluations (
            id INTEGER PRIMARY KEY AUTOINCREMENT,
            created_at TEXT NOT NULL,
            config_hash TEXT NOT NULL,
            seed INTEGER,
            scheme TEXT NOT NULL,
            snr_db REAL,
            beta REAL,
            mean REAL,
            std REAL,
            n_runs INTEGER,
            n_steps INTEGER,
            order_source TEXT,
            csit_mode TEXT
        )
    """
    )
    conn.execute(
        """
        CREATE TABLE IF NOT EXISTS traces (
            id INTEGER PRIMARY KEY AUTOINCREMENT,
            created_at TEXT NOT NULL,
            config_hash TEXT NOT NULL,
            seed INTEGER,
            scheme TEXT NOT NULL,
            snr_db REAL,
            episode INTEGER,
            mean_reward REAL,
            critic_loss_1 REAL,
            critic_loss_2 REAL,
            actor_grad_norm_1 REAL,
            actor_grad_norm_2 REAL
        )
    """
    )
    existing_cols = {
        row["name"] for row in conn.execute("PRAGMA table_info(evaluations)").fetchall()
    }
    # 舊版帳本沒有補充欄位
    for column in ("train_mean", "exhaustive_mean", "perfect_csit_mean"):
        if column not in existing_cols:
            conn.execute(f"ALTER TABLE evaluations ADD COLUMN {column} REAL")
    trace_cols = {
        row["name"] for row in conn.execute("PRAGMA table_info(traces)").fetchall()
    }
    # 舊版只記錄代理人 1 的梯度範數（欄位 actor_grad_norm）
    for column in ("actor_grad_norm_1", "actor_grad_norm_2"):
        if column not in trace_cols:
            conn.execute(f"ALTER TABLE traces ADD COLUMN {column} REAL")
    if "actor_grad_norm" in trace_cols and "actor_grad_norm_1" not in trace_cols:
        conn.execute("UPDATE traces SET actor_grad_norm_1 = actor_grad_norm")
    conn.execute("CREATE INDEX IF NOT EXISTS idx_eval_hash ON evaluations(config_hash)")
    conn.execute("CREATE INDEX IF NOT EXISTS idx_trace_hash ON traces(config_hash, scheme, snr_db)")
    conn.commit()
    conn.close()


def save_evaluation(database_path, created_at, **kwargs):
    """儲存一個 (方案, SNR) 評估結果"""
    conn = get_db(database_path)
    conn.execute(
        """
        INSERT INTO evaluations (
            created_at, config_hash, seed, scheme, snr_db, beta, mean, std,
            n_runs, n_steps, order_source, csit_mode,
            train_mean, exhaustive_mean, perfect_csit_mean
        )
        VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
    """,
        (
            created_at,
            kwargs.get("config_hash"),
            kwargs.get("seed"),
            kwargs.get("scheme"),
            kwargs.get("snr_db"),
            kwargs.get("beta"),
            kwargs.get("mean"),
            kwargs.get("std"),
            kwargs.get("n_runs"),
            kwargs.get("n_steps"),
            kwargs.get("order_source"),
            kwargs.get("csit_mode"),
            kwargs.get("train_mean"),
            kwargs.get("exhaustive_mean"),
            kwargs.get("perfect_csit_mean"),
        ),
    )
    conn.commit()
    conn.close()


def save_trace(database_path, created_at, config_hash, seed, scheme, snr_db, rows):
    """儲存訓練曲線（每回合一列）"""
    conn = get_db(database_path)
    conn.executemany(
        """
        INSERT INTO traces (
            created_at, config_hash, seed, scheme, snr_db, episode, mean_reward,
            critic_loss_1, critic_loss_2, actor_grad_norm_1, actor_grad_norm_2
        )
        VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
    """,
        [
            (
                created_at,
                config_hash,
                seed,
                scheme,
                snr_db,
                row["episode"],
                row["mean_reward"],
                row.get("critic_loss_1"),
                row.get("critic_loss_2"),
                row.get("actor_grad_norm_1"),
                row.get("actor_grad_norm_2"),
            )
            for row in rows
        ],
    )
    conn.commit()
    conn.close()


def fetch_evaluations(database_path, config_hash=None):
    """取得評估結果，可依配置雜湊篩選"""
    conn = get_db(database_path)
    if config_hash is None:
        rows = conn.execute(
            "SELECT * FROM evaluations ORDER BY id ASC"
        ).fetchall()
    else:
        rows = conn.execute(
            "SELECT * FROM evaluations WHERE config_hash = ? ORDER BY id ASC",
            (config_hash,),
        ).fetchall()
    conn.close()
    return [dict(row) for row in rows]


def fetch_trace(database_path, config_hash, scheme, snr_db, max_points):
    """取得訓練曲線，必要時在 SQL 端抽樣"""
    conn = get_db(database_path)
    where = "config_hash = ? AND scheme = ? AND snr_db = ?"
    params = (config_hash, scheme, snr_db)
    columns = "episode, mean_reward, critic_loss_1, critic_loss_2, actor_grad_norm_1, actor_grad_norm_2"
    total_count = conn.execute(
        f"SELECT COUNT(*) AS count FROM traces WHERE {where}", params
    ).fetchone()["count"]
    if max_points > 0 and total_count > max_points:
        step = max(1, total_count // max_points)
        rows = conn.execute(
            f"""
            SELECT {columns}
            FROM (
                SELECT {columns}, ROW_NUMBER() OVER (ORDER BY episode ASC) AS rn
                FROM traces
                WHERE {where}
            )
            WHERE (rn - 1) % ? = 0
            ORDER BY episode ASC
            LIMIT ?
        """,
            params + (step, max_points),
        ).fetchall()
    else:
        rows = conn.execute(
            f"SELECT {columns} FROM traces WHERE {where} ORDER BY episode ASC", params
        ).fetchall()
    conn.close()
    return [dict(row) for row in rows]


def fetch_summary(database_path):
    """各方案的平均速率統計"""
    conn = get_db(database_path)
    rows = conn.execute(
        """
        SELECT
            scheme,
            COUNT(*) as count,
            AVG(mean) as avg_rate,
            MIN(mean) as min_rate,
            MAX(mean) as max_rate
        FROM evaluations
        GROUP BY scheme
        ORDER BY scheme ASC
    """
    ).fetchall()
    conn.close()
    return [dict(row) for row in rows]
