#!/usr/bin/env python3
"""Telegram 通知模組"""

import json
import logging
import os
from copy import deepcopy
from datetime import datetime, timedelta
from pathlib import Path

import requests
from dotenv import load_dotenv

from engine.storage import now_taiwan

logger = logging.getLogger(__name__)

# 配置文件路徑
CONFIG_FILE = Path(__file__).parent / "telegram_config.json"

# 預設配置
DEFAULT_CONFIG = {
    "enabled": False,
    "bot_token": "",
    "chat_id": "",
    "events": {
        "run_finished": {
            "enabled": True,
            "cooldown_minutes": 0,
        },
        "dominance_violation": {
            "enabled": True,
            "cooldown_minutes": 30,  # 冷卻時間（分鐘），避免重複通知
        },
    },
    "last_notification": {},  # 記錄上次通知時間
}

_CONFIG_CACHE = None
_CONFIG_MTIME = None


def _merge_with_default_config(config):
    """合併預設配置，確保欄位完整"""
    merged_config = deepcopy(DEFAULT_CONFIG)
    merged_config.update(config)
    for key in DEFAULT_CONFIG["events"]:
        if key not in merged_config["events"]:
            merged_config["events"][key] = deepcopy(DEFAULT_CONFIG["events"][key])
        else:
            for subkey in DEFAULT_CONFIG["events"][key]:
                if subkey not in merged_config["events"][key]:
                    merged_config["events"][key][subkey] = DEFAULT_CONFIG["events"][key][subkey]
    return merged_config


def _apply_env(config):
    """環境變數（.env）可覆寫 token 與 chat id"""
    load_dotenv()
    token = os.environ.get("RSMAIC_TELEGRAM_TOKEN")
    chat_id = os.environ.get("RSMAIC_TELEGRAM_CHAT_ID")
    if token:
        config["bot_token"] = token
    if chat_id:
        config["chat_id"] = chat_id
    return config


def load_config():
    """載入配置（含簡易快取）；檔案不存在時使用預設值"""
    global _CONFIG_CACHE, _CONFIG_MTIME

    if not CONFIG_FILE.exists():
        return _apply_env(deepcopy(DEFAULT_CONFIG))
    try:
        current_mtime = CONFIG_FILE.stat().st_mtime
        if _CONFIG_CACHE is not None and _CONFIG_MTIME == current_mtime:
            return _apply_env(deepcopy(_CONFIG_CACHE))

        with open(CONFIG_FILE, "r", encoding="utf-8") as f:
            merged_config = _merge_with_default_config(json.load(f))
        _CONFIG_CACHE = deepcopy(merged_config)
        _CONFIG_MTIME = current_mtime
        return _apply_env(merged_config)
    except (OSError, ValueError) as e:
        logger.warning(f"[Telegram] 載入配置失敗: {e}")
        return _apply_env(deepcopy(DEFAULT_CONFIG))


def save_config(config):
    """保存配置"""
    global _CONFIG_CACHE, _CONFIG_MTIME
    try:
        with open(CONFIG_FILE, "w", encoding="utf-8") as f:
            json.dump(config, f, indent=2, ensure_ascii=False)
        _CONFIG_CACHE = _merge_with_default_config(config)
        _CONFIG_MTIME = CONFIG_FILE.stat().st_mtime if CONFIG_FILE.exists() else None
        return True
    except OSError as e:
        logger.warning(f"[Telegram] 保存配置失敗: {e}")
        return False


def send_telegram_message(bot_token, chat_id, message):
    """發送 Telegram 消息"""
    if not bot_token or not chat_id:
        return False, "Bot token 或 Chat ID 未設定"

    bot_token = bot_token.strip()
    chat_id = chat_id.strip()

    url = f"https://api.telegram.org/bot{bot_token}/sendMessage"
    payload = {"chat_id": chat_id, "text": message, "parse_mode": "HTML"}

    try:
        response = requests.post(url, json=payload, timeout=10)
        response_data = response.json()

        if response.status_code == 200:
            return True, "發送成功"
        # 解析 Telegram API 的錯誤信息
        error_description = "未知錯誤"
        if isinstance(response_data, dict):
            if "description" in response_data:
                error_description = response_data["description"]
            elif "error_code" in response_data:
                error_description = f"錯誤代碼 {response_data['error_code']}"
        return False, f"發送失敗: {error_description}"
    except requests.exceptions.Timeout:
        return False, "發送失敗: 請求超時，請檢查網絡連接"
    except requests.exceptions.ConnectionError:
        return False, "發送失敗: 無法連接到 Telegram API，請檢查網絡連接"
    except (requests.exceptions.RequestException, ValueError) as e:
        return False, f"發送失敗: {e}"


def should_send_notification(event, config):
    """檢查是否應該發送通知（考慮冷卻時間）"""
    if not config.get("enabled", False):
        return False
    event_config = config["events"].get(event, {})
    if not event_config.get("enabled", False):
        return False

    cooldown_minutes = event_config.get("cooldown_minutes", 30)
    last_time_str = config.get("last_notification", {}).get(event)
    if not last_time_str:
        return True
    try:
        last_time = datetime.fromisoformat(last_time_str)
    except ValueError:
        return True
    return now_taiwan() - last_time >= timedelta(minutes=cooldown_minutes)


def update_last_notification(event, config):
    """更新最後通知時間（僅在配置檔存在時寫回）"""
    config.setdefault("last_notification", {})[event] = now_taiwan().isoformat()
    if CONFIG_FILE.exists():
        save_config(config)


def _notify(event, lines):
    config = load_config()
    if not should_send_notification(event, config):
        return False, "通知未啟用或冷卻中"

    lines = list(lines)
    lines.append(f"\n時間: {now_taiwan().strftime('%Y-%m-%d %H:%M:%S')}")
    message = "\n".join(lines)
    success, result = send_telegram_message(config["bot_token"], config["chat_id"], message)
    if success:
        update_last_notification(event, config)
        logger.info(f"[Telegram] 通知已發送: {event}")
    else:
        logger.warning(f"[Telegram] 通知發送失敗: {result}")
    return success, result


def notify_run_finished(verb, config_hash, rows):
    """實驗完成通知；rows 為 (scheme, snr_db, mean) 序列"""
    lines = [f"<b>✅ RSMAIC {verb} 完成</b>", f"配置: {config_hash}"]
    for scheme, snr_db, mean in rows:
        lines.append(f"• {scheme} @ {snr_db:g} dB: {mean:.4f} bits")
    return _notify("run_finished", lines)


def notify_dominance_violation(count, worst):
    """外界被超越的警報；worst 為最大超出量"""
    lines = [
        "<b>⚠️ RSMAIC 上界檢查失敗</b>",
        f"違反次數: {count}",
        f"最大超出: {worst:.3e} bits",
    ]
    return _notify("dominance_violation", lines)
