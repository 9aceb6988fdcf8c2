"""
URL configuration ของ fnn_lab

มีแค่ Django admin ไว้ดู ExperimentRun / SweepCell / TrainedModel
experiment ทั้งหมดรันผ่าน management command (python manage.py synth_abs ...)
"""
from django.contrib import admin
from django.urls import path

urlpatterns = [
    path('admin/', admin.site.urls),
]
